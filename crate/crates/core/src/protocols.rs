//! Adaptive local discrimination protocols and their execution.
//!
//! A [`ProtocolTree`] describes projective single-qubit measurements on
//! individual copies, branching on every outcome. Copies are independent tensor
//! factors, so a path's probability is the product over copies of the norms of
//! the post-measurement vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm, Ket2, Mat2, C64};
use crate::states::{BipartiteKet, OrthonormalBasis};

pub const PROTOCOL_SCHEMA: &str = "protocol.v1";
const ORTHOGONAL_TOL: f64 = 1e-10;
/// Branches with probability below this are not explored by the exact evaluator.
const NEGLIGIBLE: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

impl Party {
    pub fn as_str(&self) -> &'static str {
        match self {
            Party::A => "A",
            Party::B => "B",
        }
    }
}

/// Projective measurement of one party's qubit; outcome `k` projects onto `basis[k]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalMeasurement {
    pub party: Party,
    pub basis: [Ket2; 2],
}

impl LocalMeasurement {
    /// `{k, k⊥}`.
    pub fn along(party: Party, k: Ket2) -> Self {
        LocalMeasurement {
            party,
            basis: [k, k.orthogonal()],
        }
    }

    pub fn z(party: Party) -> Self {
        LocalMeasurement {
            party,
            basis: [Ket2::zero(), Ket2::one()],
        }
    }

    pub fn from_basis(party: Party, basis: [Ket2; 2]) -> Result<Self> {
        let m = LocalMeasurement { party, basis };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<()> {
        let overlap = self.basis[0].inner(&self.basis[1]).norm();
        if overlap > ORTHOGONAL_TOL {
            return Err(Error::MalformedTree(format!(
                "measurement basis not orthonormal (overlap {overlap:e})"
            )));
        }
        Ok(())
    }

    /// Applies `|k><k|` for outcome `k` to the given party's factor of `v`.
    fn project(&self, v: &[C64; 4], outcome: usize) -> [C64; 4] {
        let k = self.basis[outcome].amplitudes();
        let mut out = [C64::default(); 4];
        match self.party {
            Party::A => {
                for j in 0..2 {
                    let s = k[0].conj() * v[j] + k[1].conj() * v[2 + j];
                    out[j] = k[0] * s;
                    out[2 + j] = k[1] * s;
                }
            }
            Party::B => {
                for i in 0..2 {
                    let s = k[0].conj() * v[2 * i] + k[1].conj() * v[2 * i + 1];
                    out[2 * i] = k[0] * s;
                    out[2 * i + 1] = k[1] * s;
                }
            }
        }
        out
    }
}

/// One node of an adaptive strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Measure {
        copy: usize,
        measurement: LocalMeasurement,
        children: Box<[Node; 2]>,
    },
    /// Records that `state` has been ruled out; purely informational.
    Eliminate {
        state: usize,
        child: Box<Node>,
    },
    Conclude {
        state: usize,
    },
}

impl Node {
    fn measure(copy: usize, measurement: LocalMeasurement, on0: Node, on1: Node) -> Node {
        Node::Measure {
            copy,
            measurement,
            children: Box::new([on0, on1]),
        }
    }

    fn eliminate(state: usize, child: Node) -> Node {
        Node::Eliminate {
            state,
            child: Box::new(child),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Node::Measure { children, .. } => children.iter().map(Node::leaf_count).sum(),
            Node::Eliminate { child, .. } => child.leaf_count(),
            Node::Conclude { .. } => 1,
        }
    }
}

/// An adaptive strategy over `copies` copies of the unknown state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTree {
    pub copies: usize,
    pub root: Node,
}

#[derive(Serialize, Deserialize)]
struct ProtocolDocument {
    schema: String,
    #[serde(flatten)]
    tree: ProtocolTree,
}

impl ProtocolTree {
    /// Always guesses `state`.
    pub fn constant(state: usize) -> Self {
        ProtocolTree {
            copies: 1,
            root: Node::Conclude { state },
        }
    }

    /// Checks copy indices, state indices, measurement bases, and that no path
    /// measures the same party of the same copy twice or concludes an eliminated state.
    pub fn validate(&self) -> Result<()> {
        fn walk(
            node: &Node,
            copies: usize,
            used: &mut Vec<(usize, Party)>,
            gone: &mut Vec<usize>,
        ) -> Result<()> {
            match node {
                Node::Measure {
                    copy,
                    measurement,
                    children,
                } => {
                    if *copy >= copies {
                        return Err(Error::MalformedTree(format!(
                            "copy index {copy} exceeds available copies {copies}"
                        )));
                    }
                    let key = (*copy, measurement.party);
                    if used.contains(&key) {
                        return Err(Error::MalformedTree(format!(
                            "party {} measures copy {copy} twice on one path",
                            measurement.party.as_str()
                        )));
                    }
                    measurement.check()?;
                    used.push(key);
                    for child in children.iter() {
                        walk(child, copies, used, gone)?;
                    }
                    used.pop();
                    Ok(())
                }
                Node::Eliminate { state, child } => {
                    if *state > 3 {
                        return Err(Error::IndexOutOfRange { index: *state });
                    }
                    gone.push(*state);
                    walk(child, copies, used, gone)?;
                    gone.pop();
                    Ok(())
                }
                Node::Conclude { state } => {
                    if *state > 3 {
                        return Err(Error::IndexOutOfRange { index: *state });
                    }
                    if gone.contains(state) {
                        return Err(Error::MalformedTree(format!(
                            "concludes state {state} after eliminating it"
                        )));
                    }
                    Ok(())
                }
            }
        }
        if self.copies == 0 {
            return Err(Error::MalformedTree("zero copies".to_string()));
        }
        walk(&self.root, self.copies, &mut Vec::new(), &mut Vec::new())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ProtocolDocument {
            schema: PROTOCOL_SCHEMA.to_string(),
            tree: self.clone(),
        })
        .expect("protocol document serializes")
    }

    pub fn from_json(text: &str) -> Result<ProtocolTree> {
        let doc: ProtocolDocument = serde_json::from_str(text)?;
        if doc.schema != PROTOCOL_SCHEMA {
            return Err(Error::Schema(format!(
                "expected schema {PROTOCOL_SCHEMA}, found {}",
                doc.schema
            )));
        }
        doc.tree.validate()?;
        Ok(doc.tree)
    }
}

/// Alice's measurement and Bob's outcome-conditioned measurements that
/// perfectly separate two orthogonal kets on one copy.
#[derive(Debug, Clone, Copy)]
pub struct WalgateSplit {
    pub alice: LocalMeasurement,
    pub bob: [LocalMeasurement; 2],
    /// `|w† K w|` for Alice's first outcome.
    pub residual: f64,
    /// `|<ν_x|η_x>|` of the unnormalized conditional Bob states, per Alice outcome.
    pub conditional_overlaps: [f64; 2],
}

fn bloch_of_hermitian(h: &Mat2) -> [f64; 3] {
    [
        h.0[0][1].re,
        -h.0[0][1].im,
        0.5 * (h.0[0][0].re - h.0[1][1].re),
    ]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn length(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn any_perpendicular(v: [f64; 3]) -> [f64; 3] {
    let axis = (0..3)
        .min_by(|&x, &y| v[x].abs().total_cmp(&v[y].abs()))
        .unwrap_or(0);
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    cross(v, e)
}

/// Builds the single-copy LOCC split of two orthogonal kets.
///
/// With amplitude matrices `M[i][j] = c[2i+j]`, Alice's outcome `u` leaves Bob
/// with `M_ψᵀ ū` and `M_φᵀ ū`, whose overlap is `w† K w` for `w = ū` and
/// `K = conj(M_φ) M_ψᵀ`. `tr K = <φ|ψ> = 0`, so writing `K = H1 + i H2` with
/// traceless Hermitian `H1, H2`, any `w` whose Bloch vector is orthogonal to
/// the Bloch vectors of both `H1` and `H2` solves `w† K w = 0`; the orthogonal
/// `w⊥` then solves it too.
pub fn walgate_split(psi: &BipartiteKet, phi: &BipartiteKet) -> Result<WalgateSplit> {
    let overlap = psi.inner(phi).norm();
    if overlap > ORTHOGONAL_TOL {
        return Err(Error::NotOrthogonal { overlap });
    }
    let m_psi = psi.amplitude_matrix();
    let m_phi = phi.amplitude_matrix();
    let k = m_phi.conj() * m_psi.transpose();
    let half_tr = k.trace() * 0.5;
    let k0 = Mat2([
        [k.0[0][0] - half_tr, k.0[0][1]],
        [k.0[1][0], k.0[1][1] - half_tr],
    ]);
    let kd = k0.adjoint();
    let mut h1 = Mat2([[C64::default(); 2]; 2]);
    let mut h2 = h1;
    for r in 0..2 {
        for c in 0..2 {
            h1.0[r][c] = (k0.0[r][c] + kd.0[r][c]) * 0.5;
            h2.0[r][c] = (k0.0[r][c] - kd.0[r][c]) * C64::new(0.0, -0.5);
        }
    }
    let (v1, v2) = (bloch_of_hermitian(&h1), bloch_of_hermitian(&h2));
    let (l1, l2) = (length(v1), length(v2));
    let n = cross(v1, v2);
    let bloch = if length(n) > 1e-12 * l1 * l2 && length(n) > 1e-300 {
        n
    } else if l1 >= l2 && l1 > 0.0 {
        any_perpendicular(v1)
    } else if l2 > 0.0 {
        any_perpendicular(v2)
    } else {
        [0.0, 0.0, 1.0]
    };
    let w0 = Ket2::from_bloch(bloch);
    let conj2 = |k: &Ket2| {
        let a = k.amplitudes();
        Ket2::normalized(a[0].conj(), a[1].conj()).expect("unit vector")
    };
    let alice = LocalMeasurement::along(Party::A, conj2(&w0));

    let mut bob = [LocalMeasurement::z(Party::B); 2];
    let mut conditional_overlaps = [0.0; 2];
    let mut residual = 0.0;
    for x in 0..2 {
        let w = conj2(&alice.basis[x]).amplitudes();
        let eta = m_psi.transpose().apply(&w);
        let nu = m_phi.transpose().apply(&w);
        let ov = crate::linalg::inner(&nu, &eta).norm();
        conditional_overlaps[x] = ov;
        if x == 0 {
            residual = ov;
        }
        let (ne, nn) = (norm(&eta), norm(&nu));
        bob[x] = if ne > 1e-12 {
            LocalMeasurement::along(Party::B, Ket2::normalized(eta[0], eta[1])?)
        } else if nn > 1e-12 {
            LocalMeasurement::along(Party::B, Ket2::normalized(nu[0], nu[1])?.orthogonal())
        } else {
            LocalMeasurement::z(Party::B)
        };
    }
    Ok(WalgateSplit {
        alice,
        bob,
        residual,
        conditional_overlaps,
    })
}

/// Subtree on `copy`: Bob outcome 0 leads to `on_psi`, outcome 1 to `on_phi`.
fn pair_node(
    psi: &BipartiteKet,
    phi: &BipartiteKet,
    copy: usize,
    on_psi: Node,
    on_phi: Node,
) -> Result<Node> {
    let split = walgate_split(psi, phi)?;
    let bob_node = |x: usize| Node::measure(copy, split.bob[x], on_psi.clone(), on_phi.clone());
    Ok(Node::measure(copy, split.alice, bob_node(0), bob_node(1)))
}

/// Single-copy protocol concluding `0` for `psi` and `1` for `phi`.
pub fn walgate_pair_protocol(psi: &BipartiteKet, phi: &BipartiteKet) -> Result<ProtocolTree> {
    Ok(ProtocolTree {
        copies: 1,
        root: pair_node(
            psi,
            phi,
            0,
            Node::Conclude { state: 0 },
            Node::Conclude { state: 1 },
        )?,
    })
}

/// Single-copy protocol on basis states `i` vs `j`, concluding with their indices.
pub fn basis_pair_protocol(b: &OrthonormalBasis, i: usize, j: usize) -> Result<ProtocolTree> {
    if i == j || i > 3 || j > 3 {
        return Err(Error::InvalidPair { i, j });
    }
    Ok(ProtocolTree {
        copies: 1,
        root: pair_node(
            b.state(i),
            b.state(j),
            0,
            Node::Conclude { state: i },
            Node::Conclude { state: j },
        )?,
    })
}

fn tournament_node(b: &OrthonormalBasis, survivors: &[usize], copy: usize) -> Result<Node> {
    if let [only] = survivors {
        return Ok(Node::Conclude { state: *only });
    }
    let (i, j) = (survivors[0], survivors[1]);
    let without = |x: usize| {
        survivors
            .iter()
            .copied()
            .filter(|&s| s != x)
            .collect::<Vec<_>>()
    };
    let on_i = Node::eliminate(j, tournament_node(b, &without(j), copy + 1)?);
    let on_j = Node::eliminate(i, tournament_node(b, &without(i), copy + 1)?);
    pair_node(b.state(i), b.state(j), copy, on_i, on_j)
}

/// Copy `r` runs the two-state split on the two lowest-indexed survivors and
/// eliminates the one not indicated. A true `ψ_i` always yields outcome `i`,
/// so the true state is never eliminated; three copies leave one survivor.
pub fn elimination_tournament(b: &OrthonormalBasis, copies: usize) -> Result<ProtocolTree> {
    if copies < 3 {
        return Err(Error::TooFewCopies {
            requested: copies,
            required: 3,
        });
    }
    Ok(ProtocolTree {
        copies,
        root: tournament_node(b, &[0, 1, 2, 3], 0)?,
    })
}

/// Two-copy protocol for `B^[θ]`: `σz ⊗ σz` on copy 0 separates `{φ±}` (correlated)
/// from `{ψ±}` (anti-correlated), then the two-state split on copy 1.
pub fn bell_grouping_protocol(theta: f64) -> Result<ProtocolTree> {
    let b = crate::states::theta_basis(theta)?;
    let correlated = Node::eliminate(
        2,
        Node::eliminate(
            3,
            pair_node(
                b.state(0),
                b.state(1),
                1,
                Node::Conclude { state: 0 },
                Node::Conclude { state: 1 },
            )?,
        ),
    );
    let anticorrelated = Node::eliminate(
        0,
        Node::eliminate(
            1,
            pair_node(
                b.state(2),
                b.state(3),
                1,
                Node::Conclude { state: 2 },
                Node::Conclude { state: 3 },
            )?,
        ),
    );
    let bob = |on0: Node, on1: Node| Node::measure(0, LocalMeasurement::z(Party::B), on0, on1);
    Ok(ProtocolTree {
        copies: 2,
        root: Node::measure(
            0,
            LocalMeasurement::z(Party::A),
            bob(correlated.clone(), anticorrelated.clone()),
            bob(anticorrelated, correlated),
        ),
    })
}

/// Single copy, `σz ⊗ σz`, guess `φ+` (index 0) on correlated outcomes and `ψ+`
/// (index 2) otherwise. Succeeds with probability ½ on the Bell basis.
pub fn z_parity_guess_protocol() -> ProtocolTree {
    let bob = |on0: usize, on1: usize| {
        Node::measure(
            0,
            LocalMeasurement::z(Party::B),
            Node::Conclude { state: on0 },
            Node::Conclude { state: on1 },
        )
    };
    ProtocolTree {
        copies: 1,
        root: Node::measure(0, LocalMeasurement::z(Party::A), bob(0, 2), bob(2, 0)),
    }
}

fn propagate(node: &Node, vecs: &mut [[C64; 4]], prob: f64, out: &mut [f64; 4]) {
    match node {
        Node::Measure {
            copy,
            measurement,
            children,
        } => {
            let before = vecs[*copy];
            let total: f64 = before.iter().map(|z| z.norm_sqr()).sum();
            for (outcome, child) in children.iter().enumerate() {
                let after = measurement.project(&before, outcome);
                let weight: f64 = after.iter().map(|z| z.norm_sqr()).sum();
                let p = prob * weight / total;
                if p <= NEGLIGIBLE {
                    continue;
                }
                let scale = weight.sqrt();
                vecs[*copy] = after.map(|z| z / scale);
                propagate(child, vecs, p, out);
            }
            vecs[*copy] = before;
        }
        Node::Eliminate { child, .. } => propagate(child, vecs, prob, out),
        Node::Conclude { state } => out[*state] += prob,
    }
}

/// Distribution of concluded indices when the copies hold `inputs` (one ket per copy,
/// or a single ket used for every copy).
pub fn conclusion_distribution(t: &ProtocolTree, inputs: &[BipartiteKet]) -> Result<[f64; 4]> {
    t.validate()?;
    let mut vecs: Vec<[C64; 4]> = match inputs {
        [one] => vec![one.amplitudes(); t.copies],
        many if many.len() == t.copies => many.iter().map(|k| k.amplitudes()).collect(),
        _ => {
            return Err(Error::MalformedTree(format!(
                "tree expects {} copies, got {} inputs",
                t.copies,
                inputs.len()
            )))
        }
    };
    let mut out = [0.0; 4];
    propagate(&t.root, &mut vecs, 1.0, &mut out);
    Ok(out)
}

/// `P(conclude = i | ψ_i)` for each basis state.
pub fn per_state_success(t: &ProtocolTree, b: &OrthonormalBasis) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = conclusion_distribution(t, std::slice::from_ref(b.state(i)))?[i];
    }
    Ok(out)
}

/// `Σ_i ¼ P(conclude = i | ψ_i)` by exact Born-rule propagation.
pub fn exact_success_probability(t: &ProtocolTree, b: &OrthonormalBasis) -> Result<f64> {
    Ok(per_state_success(t, b)?.iter().sum::<f64>() / 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub copy: usize,
    pub party: Party,
    pub outcome: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub guessed_index: usize,
    pub transcript: Vec<TranscriptEntry>,
    /// Born probability of the sampled path.
    pub probability: f64,
}

impl RunOutcome {
    /// `copy,party,outcome` rows with a header line.
    pub fn transcript_csv(&self) -> String {
        let mut s = String::from("copy,party,outcome\n");
        for e in &self.transcript {
            s.push_str(&format!("{},{},{}\n", e.copy, e.party.as_str(), e.outcome));
        }
        s
    }
}

/// Samples one execution with every copy prepared in `input`.
pub fn run_with_rng(
    t: &ProtocolTree,
    input: &BipartiteKet,
    rng: &mut impl Rng,
) -> Result<RunOutcome> {
    t.validate()?;
    let mut vecs = vec![input.amplitudes(); t.copies];
    let mut transcript = Vec::new();
    let mut probability = 1.0;
    let mut node = &t.root;
    loop {
        match node {
            Node::Measure {
                copy,
                measurement,
                children,
            } => {
                let v = vecs[*copy];
                let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                let after0 = measurement.project(&v, 0);
                let p0 = (after0.iter().map(|z| z.norm_sqr()).sum::<f64>() / total).clamp(0.0, 1.0);
                let outcome = usize::from(rng.gen::<f64>() >= p0);
                let after = if outcome == 0 {
                    after0
                } else {
                    measurement.project(&v, 1)
                };
                let weight: f64 = after.iter().map(|z| z.norm_sqr()).sum();
                probability *= if outcome == 0 { p0 } else { 1.0 - p0 };
                let scale = weight.sqrt();
                vecs[*copy] = after.map(|z| z / scale);
                transcript.push(TranscriptEntry {
                    copy: *copy,
                    party: measurement.party,
                    outcome,
                });
                node = &children[outcome];
            }
            Node::Eliminate { child, .. } => node = child,
            Node::Conclude { state } => {
                return Ok(RunOutcome {
                    guessed_index: *state,
                    transcript,
                    probability,
                })
            }
        }
    }
}

/// Samples one execution on `ψ_true_index` with a deterministic seeded RNG.
pub fn sample_run(
    t: &ProtocolTree,
    b: &OrthonormalBasis,
    true_index: usize,
    seed: u64,
) -> Result<RunOutcome> {
    if true_index > 3 {
        return Err(Error::IndexOutOfRange { index: true_index });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run_with_rng(t, b.state(true_index), &mut rng)
}

/// Empirical statistics of `runs` seeded executions with uniformly drawn true states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingSummary {
    pub runs: u64,
    pub successes: u64,
    pub empirical_rate: f64,
    /// Wilson 95% interval.
    pub ci95: [f64; 2],
    pub seed: u64,
}

pub fn sample_success(
    t: &ProtocolTree,
    b: &OrthonormalBasis,
    runs: u64,
    seed: u64,
) -> Result<SamplingSummary> {
    t.validate()?;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0;
    for _ in 0..runs {
        let truth = master.gen_range(0..4usize);
        let mut rng = ChaCha8Rng::seed_from_u64(master.gen());
        if run_with_rng(t, b.state(truth), &mut rng)?.guessed_index == truth {
            successes += 1;
        }
    }
    let rate = if runs == 0 {
        0.0
    } else {
        successes as f64 / runs as f64
    };
    Ok(SamplingSummary {
        runs,
        successes,
        empirical_rate: rate,
        ci95: wilson_interval(successes, runs, 1.959963984540054),
        seed,
    })
}

pub fn wilson_interval(successes: u64, runs: u64, z: f64) -> [f64; 2] {
    if runs == 0 {
        return [0.0, 1.0];
    }
    let n = runs as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    [(centre - half).max(0.0), (centre + half).min(1.0)]
}
