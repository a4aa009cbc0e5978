//! Quantum channels and subchannels in Kraus form, with the constructions that
//! produce members of C(S) = {Φ : S_Φ ⊆ S}.

pub mod project;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::OrthogonalLabelling;
use crate::linalg::eig::{psd_sqrt, range_projection};
use crate::linalg::{jacobi_eigen, lambda_max, ComplexMatrix};
use crate::opsys::{self, OperatorSystem};
use crate::projections::{is_full_projection, projection_range};

pub use project::{project_into, random_channel_in_c, ProjectOptions};

/// Tolerance for trace preservation and `S_Φ ⊆ S` membership.
pub const CHANNEL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Channel,
    Subchannel,
}

/// `Φ(T) = Σ_p A_p T A_p*` with `k × d` Kraus operators.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawChannel")]
pub struct QuantumChannel {
    d: usize,
    k: usize,
    kind: ChannelKind,
    kraus: Vec<ComplexMatrix>,
}

#[derive(Deserialize)]
struct RawChannel {
    d: usize,
    k: usize,
    kind: ChannelKind,
    kraus: Vec<ComplexMatrix>,
}

impl TryFrom<RawChannel> for QuantumChannel {
    type Error = Error;

    fn try_from(r: RawChannel) -> Result<Self> {
        let c = QuantumChannel::with_kind(r.kraus, r.kind)?;
        if c.d != r.d || c.k != r.k {
            return Err(Error::shape(format!("{}x{} Kraus operators", r.k, r.d), format!("{}x{}", c.k, c.d)));
        }
        Ok(c)
    }
}

impl QuantumChannel {
    /// Validates `Σ A_p* A_p = I`.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_kind(kraus, ChannelKind::Channel)
    }

    /// Validates `Σ A_p* A_p ⪯ I`.
    pub fn subchannel(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_kind(kraus, ChannelKind::Subchannel)
    }

    fn with_kind(kraus: Vec<ComplexMatrix>, kind: ChannelKind) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyInput("Kraus operators"))?;
        let (k, d) = first.shape();
        if kraus.iter().any(|a| a.shape() != (k, d)) {
            return Err(Error::shape(format!("{k}x{d} Kraus operators"), "mixed shapes"));
        }
        let c = Self { d, k, kind, kraus };
        let sum = c.kraus_sum();
        let id = ComplexMatrix::identity(d);
        match kind {
            ChannelKind::Channel => {
                let r = (&sum - &id).max_abs();
                if r > CHANNEL_TOL {
                    return Err(Error::Invalid(format!("Kraus operators are not trace preserving (residual {r:.2e})")));
                }
            }
            ChannelKind::Subchannel => {
                let top = lambda_max(&sum);
                if top > 1.0 + CHANNEL_TOL {
                    return Err(Error::Invalid(format!("Kraus operators are not trace decreasing (λ_max {top:.6})")));
                }
            }
        }
        Ok(c)
    }

    pub fn identity(d: usize) -> Self {
        Self { d, k: d, kind: ChannelKind::Channel, kraus: vec![ComplexMatrix::identity(d)] }
    }

    /// Input dimension.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Output dimension.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn into_kraus(self) -> Vec<ComplexMatrix> {
        self.kraus
    }

    pub fn kraus_sum(&self) -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(self.d, self.d);
        for a in &self.kraus {
            s = &s + &a.adjoint_mul(a);
        }
        s
    }

    pub fn apply(&self, t: &ComplexMatrix) -> Result<ComplexMatrix> {
        if t.shape() != (self.d, self.d) {
            return Err(Error::shape(format!("{0}x{0}", self.d), format!("{:?}", t.shape())));
        }
        let mut out = ComplexMatrix::zeros(self.k, self.k);
        for a in &self.kraus {
            out = &out + &a.matmul(t).mul_adjoint(a);
        }
        Ok(out)
    }

    /// `Φ*(S) = Σ_p A_p* S A_p`.
    pub fn adjoint_apply(&self, s: &ComplexMatrix) -> Result<ComplexMatrix> {
        if s.shape() != (self.k, self.k) {
            return Err(Error::shape(format!("{0}x{0}", self.k), format!("{:?}", s.shape())));
        }
        let mut out = ComplexMatrix::zeros(self.d, self.d);
        for a in &self.kraus {
            out = &out + &a.adjoint_mul(&s.matmul(a));
        }
        Ok(out)
    }

    /// `S_Φ = span{A_p* A_q}`.
    pub fn confusability(&self) -> Result<OperatorSystem> {
        opsys::from_kraus(&self.kraus)
    }

    /// `max_{p,q} ‖proj_{S⊥}(A_p* A_q)‖_F`: zero iff `S_Φ ⊆ S`.
    pub fn membership_residual(&self, s: &OperatorSystem) -> Result<f64> {
        if s.dim_h() != self.d {
            return Err(Error::shape(format!("system on C^{}", self.d), format!("C^{}", s.dim_h())));
        }
        let perp = s.perp();
        let mut worst: f64 = 0.0;
        for (p, a) in self.kraus.iter().enumerate() {
            for b in &self.kraus[p..] {
                worst = worst.max(perp.projection_norm_sqr(&a.adjoint_mul(b)).sqrt());
            }
        }
        Ok(worst)
    }

    pub fn is_member_of(&self, s: &OperatorSystem) -> Result<bool> {
        Ok(self.membership_residual(s)? <= CHANNEL_TOL)
    }

    /// Restricts the output to the joint range of the Kraus operators; the
    /// result has output dimension equal to that rank and the same `S_Φ`.
    pub fn compress_output(&self) -> Self {
        let mut r = ComplexMatrix::zeros(self.k, self.k);
        for a in &self.kraus {
            r = &r + &a.mul_adjoint(a);
        }
        let (_, rank) = range_projection(&r, 1e-10);
        if rank == self.k {
            return self.clone();
        }
        let e = jacobi_eigen(&r);
        let cols: Vec<Vec<C64>> = (self.k - rank..self.k).map(|i| e.vector(i)).collect();
        let w = ComplexMatrix::from_columns(&cols);
        let kraus = self.kraus.iter().map(|a| w.adjoint_mul(a)).collect();
        Self { d: self.d, k: rank.max(1), kind: self.kind, kraus }
    }

    /// Drops Kraus operators that are numerically zero.
    fn pruned(mut self) -> Self {
        self.kraus.retain(|a| a.max_abs() > 1e-14);
        self
    }
}

/// Stacks Kraus operators into the isometry `V = [A_1; …; A_m]`.
pub fn stack(kraus: &[ComplexMatrix]) -> ComplexMatrix {
    let (k, d) = kraus[0].shape();
    let mut v = ComplexMatrix::zeros(k * kraus.len(), d);
    for (p, a) in kraus.iter().enumerate() {
        v.set_block(p * k, 0, a);
    }
    v
}

pub fn unstack(v: &ComplexMatrix, k: usize) -> Vec<ComplexMatrix> {
    (0..v.rows() / k).map(|p| v.block(p * k, 0, k, v.cols())).collect()
}

/// `Φ(T) = Q⊥ T Q⊥ + Tr(TQ) ηη*` for an S-full projection `Q` and a unit `η` in its range.
pub fn channel_from_full_projection(s: &OperatorSystem, q: &ComplexMatrix, eta: Option<&[C64]>) -> Result<QuantumChannel> {
    if !is_full_projection(s, q, 1e-8)? {
        return Err(Error::WrongProjectionClass("Q is not S-full".into()));
    }
    let d = s.dim_h();
    let range = projection_range(q, 1e-8).ok_or_else(|| Error::WrongProjectionClass("Q is not a projection".into()))?;
    let eta: Vec<C64> = match eta {
        Some(e) => e.to_vec(),
        None => range.first().cloned().ok_or(Error::EmptyInput("range of Q"))?,
    };
    if eta.len() != d || (q.mat_vec(&eta).iter().zip(&eta).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)) > 1e-8 {
        return Err(Error::Invalid("η must be a unit vector in the range of Q".into()));
    }
    let mut eta = eta;
    crate::linalg::normalize(&mut eta);
    let mut kraus = vec![&ComplexMatrix::identity(d) - q];
    for u in &range {
        kraus.push(ComplexMatrix::outer(&eta, u));
    }
    Ok(QuantumChannel::new(kraus)?.pruned())
}

/// `Φ(T) = Σ_x (a_x e_x*) T (e_x a_x*)` from an orthogonal labelling; `S_Φ ⊆ S_G`.
pub fn channel_from_labelling(lab: &OrthogonalLabelling) -> Result<QuantumChannel> {
    lab.validate(1e-8)?;
    let d = lab.graph.n();
    let kraus = (0..d)
        .map(|x| ComplexMatrix::outer(&lab.vectors[x], &crate::linalg::basis_vector(d, x)))
        .collect();
    QuantumChannel::new(kraus)
}

/// Adds `B₀ = (I − Σ A_p* A_p)^{1/2}` on an orthogonal output summand.
/// Fails if `B₀² ∉ S`, since the completion would then leave C(S).
pub fn complete_subchannel(sub: &QuantumChannel, s: &OperatorSystem) -> Result<QuantumChannel> {
    let d = sub.d;
    let defect = &ComplexMatrix::identity(d) - &sub.kraus_sum();
    if defect.max_abs() <= 1e-12 {
        return QuantumChannel::new(sub.kraus.clone());
    }
    if !s.contains(&defect, 1e-8)? {
        return Err(Error::Invalid("I − Σ A_p* A_p is not in S; completion would leave C(S)".into()));
    }
    let b0 = psd_sqrt(&defect.hermitian_part());
    let k = sub.k + d;
    let mut kraus: Vec<ComplexMatrix> = sub
        .kraus
        .iter()
        .map(|a| {
            let mut e = ComplexMatrix::zeros(k, d);
            e.set_block(0, 0, a);
            e
        })
        .collect();
    let mut e = ComplexMatrix::zeros(k, d);
    e.set_block(sub.k, 0, &b0);
    kraus.push(e);
    QuantumChannel::new(kraus)
}

/// A channel moved into C(S') together with the output map `Y` carrying states:
/// a certificate `(Φ, σ)` becomes `(Φ', Y* σ Y)`.
#[derive(Clone, Debug)]
pub struct TransferredChannel {
    pub channel: QuantumChannel,
    pub output_map: ComplexMatrix,
}

/// Moves `Φ` into C(S') through its Kraus Gram matrix `B = (A_i* A_j)`: each block
/// is projected onto S', the result is shifted to be PSD, refactored as
/// `B' = V'* V'`, scaled to a subchannel and completed. The output dimension
/// becomes `md` (plus `d` for the completion).
pub fn transfer_channel(phi: &QuantumChannel, s: &OperatorSystem) -> Result<TransferredChannel> {
    let (d, k, m) = (phi.d, phi.k, phi.kraus.len());
    if s.dim_h() != d {
        return Err(Error::shape(format!("system on M_{d}"), format!("M_{}", s.dim_h())));
    }
    let n = m * d;
    let mut gram = ComplexMatrix::zeros(n, n);
    let mut moved = ComplexMatrix::zeros(n, n);
    for (i, a) in phi.kraus.iter().enumerate() {
        for (j, b) in phi.kraus.iter().enumerate() {
            let block = a.adjoint_mul(b);
            moved.set_block(i * d, j * d, &s.subspace().project(&block)?);
            gram.set_block(i * d, j * d, &block);
        }
    }
    let mut moved = moved.hermitian_part();
    let low = crate::linalg::lambda_min(&moved);
    if low < 0.0 {
        moved.axpy(C64::new(-low, 0.0), &ComplexMatrix::identity(n));
    }
    let root = psd_sqrt(&moved);
    let mut kraus: Vec<ComplexMatrix> = (0..m).map(|i| root.block(0, i * d, n, d)).collect();
    let mut sum = ComplexMatrix::zeros(d, d);
    for a in &kraus {
        sum = &sum + &a.adjoint_mul(a);
    }
    let scale = lambda_max(&sum);
    if scale <= 0.0 {
        return Err(Error::Invalid("transferred Gram matrix vanished".into()));
    }
    for a in &mut kraus {
        *a = a.scale_re(1.0 / scale.sqrt());
    }
    let channel = complete_subchannel(&QuantumChannel::subchannel(kraus)?, s)?;

    // Row operator V = [A_1 … A_m] = W B^{1/2}; W = V B^{+1/2}.
    let mut row = ComplexMatrix::zeros(k, n);
    for (i, a) in phi.kraus.iter().enumerate() {
        row.set_block(0, i * d, a);
    }
    let inv_root = jacobi_eigen(&gram.hermitian_part()).map(|x| if x > 1e-12 { 1.0 / x.sqrt() } else { 0.0 });
    let w = row.matmul(&inv_root);
    let mut output_map = ComplexMatrix::zeros(k, channel.k);
    output_map.set_block(0, 0, &w);
    Ok(TransferredChannel { channel, output_map })
}

/// `Φ₁ ⊗ Φ₂` with Kraus operators `A_p ⊗ B_q`.
pub fn tensor_channel(a: &QuantumChannel, b: &QuantumChannel) -> QuantumChannel {
    let mut kraus = Vec::with_capacity(a.kraus.len() * b.kraus.len());
    for x in &a.kraus {
        for y in &b.kraus {
            kraus.push(x.kron(y));
        }
    }
    let kind = if a.kind == ChannelKind::Channel && b.kind == ChannelKind::Channel { ChannelKind::Channel } else { ChannelKind::Subchannel };
    QuantumChannel { d: a.d * b.d, k: a.k * b.k, kind, kraus }
}

/// `V_i = e_i ⊗ I_d : C^d → C^m ⊗ C^d`.
fn block_embedding(m: usize, d: usize, i: usize) -> ComplexMatrix {
    let mut v = ComplexMatrix::zeros(m * d, d);
    v.set_block(i * d, 0, &ComplexMatrix::identity(d));
    v
}

/// `Φ ∘ Γ` with `Γ(X) = Σ_i V_i* X V_i`; maps C(S) into C(M_m(S)).
pub fn amplified_channel(phi: &QuantumChannel, m: usize) -> Result<QuantumChannel> {
    if m == 0 {
        return Err(Error::Invalid("amplification level must be positive".into()));
    }
    let d = phi.d;
    let mut kraus = Vec::new();
    for i in 0..m {
        let v = block_embedding(m, d, i);
        for a in &phi.kraus {
            kraus.push(a.mul_adjoint(&v));
        }
    }
    QuantumChannel::with_kind(kraus, phi.kind)
}

/// `Ψ ∘ Λ` with `Λ(X) = (1/m) Σ_i V_i X V_i*`; maps C(M_m(S)) into C(S).
pub fn compressed_channel(psi: &QuantumChannel, m: usize) -> Result<QuantumChannel> {
    if m == 0 || !psi.d.is_multiple_of(m) {
        return Err(Error::Invalid(format!("input dimension {} is not a multiple of {m}", psi.d)));
    }
    let d = psi.d / m;
    let w = 1.0 / (m as f64).sqrt();
    let mut kraus = Vec::new();
    for i in 0..m {
        let v = block_embedding(m, d, i).scale_re(w);
        for b in &psi.kraus {
            kraus.push(b.matmul(&v));
        }
    }
    QuantumChannel::with_kind(kraus, psi.kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{optimal_labelling, Graph};
    use crate::linalg::random::{random_hermitian, random_isometry, random_state, random_unitary};
    use crate::linalg::{basis_vector, op_norm};
    use crate::opsys::from_graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_channel(d: usize, k: usize, m: usize, rng: &mut ChaCha8Rng) -> QuantumChannel {
        QuantumChannel::new(unstack(&random_isometry(k * m, d, rng), k)).unwrap()
    }

    #[test]
    fn adjoint_and_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let phi = random_channel(3, 4, 2, &mut rng);
        for _ in 0..5 {
            let t = random_hermitian(3, &mut rng);
            let s = random_hermitian(4, &mut rng);
            let lhs = phi.apply(&t).unwrap().hs_inner(&s).unwrap();
            let rhs = t.hs_inner(&phi.adjoint_apply(&s).unwrap()).unwrap();
            assert!((lhs - rhs).norm() < 1e-9);
            let rho = random_state(3, &mut rng);
            assert!((phi.apply(&rho).unwrap().trace().re - 1.0).abs() < 1e-8);
        }
        assert!((&phi.adjoint_apply(&ComplexMatrix::identity(4)).unwrap() - &ComplexMatrix::identity(3)).max_abs() < 1e-8);
        let t = random_hermitian(3, &mut rng);
        assert_eq!(QuantumChannel::identity(3).apply(&t).unwrap(), t);
    }

    #[test]
    fn json_round_trip_validates() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let phi = random_channel(2, 2, 2, &mut rng);
        let text = serde_json::to_string(&phi).unwrap();
        let back: QuantumChannel = serde_json::from_str(&text).unwrap();
        for (a, b) in back.kraus().iter().zip(phi.kraus()) {
            assert!((a - b).max_abs() < 1e-14);
        }
        let bad = text.replace("\"d\":2", "\"d\":3");
        assert!(serde_json::from_str::<QuantumChannel>(&bad).is_err());
        assert!(QuantumChannel::new(vec![ComplexMatrix::identity(2).scale_re(0.5)]).is_err());
        assert!(QuantumChannel::subchannel(vec![ComplexMatrix::identity(2).scale_re(0.5)]).is_ok());
    }

    #[test]
    fn full_projection_channels() {
        let g = Graph::cycle(5);
        let s = from_graph(&g);
        let mut q = ComplexMatrix::zeros(5, 5);
        q[(0, 0)] = C64::new(1.0, 0.0);
        q[(1, 1)] = C64::new(1.0, 0.0);
        let phi = channel_from_full_projection(&s, &q, None).unwrap();
        assert!(phi.is_member_of(&s).unwrap());
        // Oracle: S_Φ computed from scratch is inside S_G.
        assert!(s.subspace().contains_subspace(phi.confusability().unwrap().subspace(), 1e-8).unwrap());
        let eta = basis_vector(5, 0);
        let back = phi.adjoint_apply(&ComplexMatrix::outer(&eta, &eta)).unwrap();
        assert!((&back - &q).max_abs() < 1e-12);
        // Q = I in M_d: constant channel.
        let full = OperatorSystem::full(3);
        let c = channel_from_full_projection(&full, &ComplexMatrix::identity(3), None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = c.apply(&random_state(3, &mut rng)).unwrap();
        let e0 = basis_vector(3, 0);
        assert!((&out - &ComplexMatrix::outer(&e0, &e0)).max_abs() < 1e-12);
        assert_eq!(c.compress_output().k(), 1);
        // Non-full Q rejected.
        assert!(channel_from_full_projection(&s, &ComplexMatrix::identity(5), None).is_err());
    }

    #[test]
    fn labelling_channels() {
        let e = Graph::empty(3);
        let lab = crate::graphs::labelling_from_clique_cover(&e, &[vec![0], vec![1], vec![2]]).unwrap();
        let phi = channel_from_labelling(&lab).unwrap();
        assert!(phi.is_member_of(&from_graph(&e)).unwrap());
        let k = Graph::complete(4);
        let lab = crate::graphs::labelling_from_clique_cover(&k, &[vec![0, 1, 2, 3]]).unwrap();
        let phi = channel_from_labelling(&lab).unwrap();
        let a = &lab.vectors[0];
        let back = phi.adjoint_apply(&ComplexMatrix::outer(a, a)).unwrap();
        assert!((&back - &ComplexMatrix::identity(4)).max_abs() < 1e-10);
        let c5 = Graph::cycle(5);
        let lab = optimal_labelling(&c5).unwrap();
        let phi = channel_from_labelling(&lab).unwrap();
        assert!(phi.is_member_of(&from_graph(&c5)).unwrap());
        let m = phi.adjoint_apply(&ComplexMatrix::outer(&lab.handle, &lab.handle)).unwrap();
        let inv_norm = 1.0 / crate::linalg::lambda_min(&m);
        assert!((inv_norm - 5f64.sqrt()).abs() < 1e-3, "{inv_norm}");
    }

    #[test]
    fn subchannel_completion() {
        let s = OperatorSystem::scalars(2);
        let half = QuantumChannel::subchannel(vec![ComplexMatrix::identity(2).scale_re(0.5f64.sqrt())]).unwrap();
        let full = complete_subchannel(&half, &s).unwrap();
        assert_eq!(full.kind(), ChannelKind::Channel);
        let last = full.kraus().last().unwrap();
        assert!((&last.adjoint_mul(last) - &ComplexMatrix::identity(2).scale_re(0.5)).max_abs() < 1e-12);
        assert!(full.is_member_of(&s).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_state(2, &mut rng);
        let a = half.apply(&rho).unwrap();
        let b = full.apply(&rho).unwrap();
        let padded = {
            let mut p = ComplexMatrix::zeros(4, 4);
            p.set_block(0, 0, &a);
            p
        };
        assert!(crate::linalg::lambda_min(&(&b - &padded)) > -1e-12);
        let id = QuantumChannel::identity(2);
        assert_eq!(complete_subchannel(&id, &s).unwrap().kraus(), id.kraus());
        // Scaled labelling subchannel on S_{C5}: the defect is (1−c²)I ∈ S_G.
        let c5 = Graph::cycle(5);
        let lab = optimal_labelling(&c5).unwrap();
        let kr: Vec<ComplexMatrix> = channel_from_labelling(&lab).unwrap().kraus().iter().map(|a| a.scale_re(0.8)).collect();
        let sub = QuantumChannel::subchannel(kr).unwrap();
        let done = complete_subchannel(&sub, &from_graph(&c5)).unwrap();
        assert!(done.is_member_of(&from_graph(&c5)).unwrap());
        // Defect outside S is reported.
        let p = QuantumChannel::subchannel(vec![ComplexMatrix::outer(&basis_vector(2, 0), &basis_vector(2, 0))]).unwrap();
        assert!(complete_subchannel(&p, &s).is_err());
    }

    #[test]
    fn tensor_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let id = tensor_channel(&QuantumChannel::identity(2), &QuantumChannel::identity(3));
        assert_eq!(id.kraus()[0], ComplexMatrix::identity(6));
        let a = random_channel(2, 2, 2, &mut rng);
        let b = random_channel(2, 3, 3, &mut rng);
        let ab = tensor_channel(&a, &b);
        assert_eq!(ab.kraus().len(), 6);
        let s1 = random_state(2, &mut rng);
        let s2 = random_state(3, &mut rng);
        let lhs = ab.adjoint_apply(&s1.kron(&s2)).unwrap();
        let rhs = a.adjoint_apply(&s1).unwrap().kron(&b.adjoint_apply(&s2).unwrap());
        assert!((&lhs - &rhs).max_abs() < 1e-9);
    }

    #[test]
    fn amplification_round_trip() {
        let c5 = Graph::cycle(5);
        let s = from_graph(&c5);
        let phi = channel_from_labelling(&optimal_labelling(&c5).unwrap()).unwrap();
        let amp = amplified_channel(&phi, 2).unwrap();
        assert!(amp.is_member_of(&opsys::amplify(&s, 2)).unwrap());
        let back = compressed_channel(&amp, 2).unwrap();
        assert!(back.is_member_of(&s).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..3 {
            let t = random_hermitian(5, &mut rng);
            assert!((&back.apply(&t).unwrap() - &phi.apply(&t).unwrap()).max_abs() < 1e-10);
        }
        let one = amplified_channel(&phi, 1).unwrap();
        assert_eq!(one.kraus(), phi.kraus());
    }

    #[test]
    fn confusability_is_kraus_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let phi = random_channel(3, 2, 3, &mut rng);
        let u = random_unitary(3, &mut rng);
        let mixed: Vec<ComplexMatrix> = (0..3)
            .map(|p| {
                let mut acc = ComplexMatrix::zeros(2, 3);
                for q in 0..3 {
                    acc.axpy(u[(p, q)], &phi.kraus()[q]);
                }
                acc
            })
            .collect();
        let psi = QuantumChannel::new(mixed).unwrap();
        assert!(phi.confusability().unwrap().same_as(&psi.confusability().unwrap()));
        assert!(op_norm(&(&phi.apply(&ComplexMatrix::identity(3)).unwrap() - &psi.apply(&ComplexMatrix::identity(3)).unwrap())) < 1e-10);
    }
}
