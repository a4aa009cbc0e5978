//! Full parameter report for a few operator systems, read from the same
//! input syntax the CLI accepts.

use ncgraph::cli::{self, RenderText, RunConfig};

fn main() -> ncgraph::Result<()> {
    let cfg = RunConfig::default();
    for spec in ["c5", "s:2,2", "scalars:3", "amplify:2:scalars:2"] {
        let s = cli::read_input(spec)?.system();
        println!("== {spec}");
        println!("{}", cli::cmd_system_params(&s, &cfg)?.render_text());
    }
    Ok(())
}
