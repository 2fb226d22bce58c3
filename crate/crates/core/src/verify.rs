//! Gate-teleportation identities checked by direct state-vector simulation.

use rand::Rng;

use num_complex::Complex64;

use crate::network::{
    build_foliated_network, compute_check_group, cyclize, simulate_network, transpile, CheckGroup, CircuitIR,
    FusionNetwork, NetworkError, NetworkModel,
};
use crate::pauli::{intersect, PauliOperator, SpanBasis};
use crate::statevec::{hadamard, random_unitary, t_gate, Basis, GateApplication, Matrix2, StateError, StateVector};

/// Pass criterion for "equal up to global phase".
pub const OVERLAP_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportCase {
    /// Fusion outcome bits in the order the fusions were performed.
    pub outcome: Vec<u8>,
    pub probability: f64,
    pub overlap: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TeleportationReport {
    pub cases: Vec<TeleportCase>,
}

impl TeleportationReport {
    pub fn min_overlap(&self) -> f64 {
        self.cases.iter().map(|c| c.overlap).fold(1.0, f64::min)
    }

    pub fn max_infidelity(&self) -> f64 {
        1.0 - self.min_overlap()
    }

    pub fn passed(&self) -> bool {
        !self.cases.is_empty() && self.min_overlap() >= 1.0 - OVERLAP_TOLERANCE
    }
}

fn bell_cluster() -> StateVector {
    StateVector::plus(2).unwrap().apply(&GateApplication::cz(0, 1).unwrap()).unwrap()
}

/// Linear cluster on `c_a, c_out, t_a, t_out` (qubits 0..4).
pub fn cnot_ancilla() -> StateVector {
    let mut s = StateVector::plus(4).unwrap();
    for (a, b) in [(0, 1), (1, 2), (2, 3)] {
        s.apply_in_place(&GateApplication::cz(a, b).unwrap()).unwrap();
    }
    s
}

/// Stabilizer generators of [`cnot_ancilla`].
pub fn cnot_ancilla_generators() -> Vec<PauliOperator> {
    ["XZII", "ZXZI", "IZXZ", "IIZX"].iter().map(|s| s.parse().unwrap()).collect()
}

/// For a random input `|ψ⟩` on `q_in` entangled with one spectator, and
/// each fusion outcome `(u, v)` on `(q_a, q_in)`, compares the output with
/// `U Z^v X^u |ψ⟩`.
pub fn single_qubit_teleportation<R: Rng + ?Sized>(u: Matrix2, rng: &mut R) -> Result<TeleportationReport, StateError> {
    let gate = GateApplication::single(u, 0)?;
    let psi = StateVector::random(2, rng)?;
    // Qubits: 0 q_in, 1 spectator, 2 q_a, 3 q_out.
    let mut anc = bell_cluster();
    anc.apply_in_place(&GateApplication::single(u, 1)?)?;
    let joint = psi.tensor(&anc)?;
    let mut report = TeleportationReport::default();
    for a in 0..2u8 {
        for b in 0..2u8 {
            let (out, probability) = joint.fusion_project(2, 0, (a, b))?;
            let mut expected = psi.clone();
            if a == 1 {
                expected.apply_in_place(&GateApplication::x(0))?;
            }
            if b == 1 {
                expected.apply_in_place(&GateApplication::z(0))?;
            }
            expected.apply_in_place(&gate)?;
            // Remaining order is (spectator, q_out).
            let expected = expected.permute(&[1, 0])?;
            report.cases.push(TeleportCase { outcome: vec![a, b], probability, overlap: out.overlap(&expected)? });
        }
    }
    Ok(report)
}

/// CNOT teleportation through the four-qubit linear cluster for all 16
/// fusion outcomes and `inputs` random two-qubit inputs entangled with two
/// spectators. The expected output is
/// `CNOT Z^{v_c}_c X^{u_c}_c Z^{v_t}_t X^{u_t}_t |ψ⟩`.
pub fn cnot_teleportation<R: Rng + ?Sized>(inputs: usize, rng: &mut R) -> Result<TeleportationReport, StateError> {
    let mut report = TeleportationReport::default();
    for _ in 0..inputs {
        // Qubits: 0 c_in, 1 t_in, 2 and 3 spectators, 4 c_a, 5 c_out, 6 t_a, 7 t_out.
        let psi = StateVector::random(4, rng)?;
        let joint = psi.tensor(&cnot_ancilla())?;
        for outcome in 0..16u8 {
            let (uc, vc, ut, vt) = (outcome >> 3 & 1, outcome >> 2 & 1, outcome >> 1 & 1, outcome & 1);
            let (s1, p1) = joint.fusion_project(4, 0, (uc, vc))?;
            // After removing qubits 0 and 4: 0 t_in, 1 and 2 spectators, 3 c_out, 4 t_a, 5 t_out.
            let (out, p2) = s1.fusion_project(4, 0, (ut, vt))?;
            // Remaining: spectators, c_out, t_out.
            let mut expected = psi.clone();
            for (cond, g) in [
                (ut, GateApplication::x(1)),
                (vt, GateApplication::z(1)),
                (uc, GateApplication::x(0)),
                (vc, GateApplication::z(0)),
            ] {
                if cond == 1 {
                    expected.apply_in_place(&g)?;
                }
            }
            expected.apply_in_place(&GateApplication::cnot(0, 1)?)?;
            let expected = expected.permute(&[2, 3, 0, 1])?;
            report.cases.push(TeleportCase {
                outcome: vec![uc, vc, ut, vt],
                probability: p1 * p2,
                overlap: out.overlap(&expected)?,
            });
        }
    }
    Ok(report)
}

/// Largest deviation of `⟨anc|g|anc⟩` from `+1` over [`cnot_ancilla_generators`].
pub fn cnot_ancilla_deviation() -> f64 {
    let anc = cnot_ancilla();
    cnot_ancilla_generators().iter().map(|g| (anc.expectation(g).unwrap() - 1.0).abs()).fold(0.0, f64::max)
}

/// Compares fusion on `(q1, q2)` with `CZ(q1, q2)` followed by destructive
/// `X` measurements, for every outcome. Returns the largest probability
/// difference and the largest post-state infidelity.
pub fn fusion_cz_deviation(state: &StateVector, q1: usize, q2: usize) -> Result<(f64, f64), StateError> {
    let cz = state.apply(&GateApplication::cz(q1, q2)?)?;
    let (mut dp, mut df) = (0.0f64, 0.0f64);
    let probs = state.fusion_probabilities(q1, q2)?;
    for u in 0..2u8 {
        for v in 0..2u8 {
            let pf = probs[(2 * u + v) as usize];
            let p1 = cz.measure_probability(q1, Basis::X, u)?;
            let q2_after = if q2 > q1 { q2 - 1 } else { q2 };
            let alt = if p1 > 1e-12 {
                let (s1, p1) = cz.measure_project(q1, Basis::X, u)?;
                let p2 = s1.measure_probability(q2_after, Basis::X, v)?;
                if p2 > 1e-12 {
                    let (s2, p2) = s1.measure_project(q2_after, Basis::X, v)?;
                    Some((s2, p1 * p2))
                } else {
                    None
                }
            } else {
                None
            };
            match (pf > 1e-12, alt) {
                (true, Some((s2, pa))) => {
                    let (sf, _) = state.fusion_project(q1, q2, (u, v))?;
                    dp = dp.max((pf - pa).abs());
                    df = df.max(1.0 - sf.overlap(&s2)?);
                }
                (false, None) => {}
                (_, alt) => dp = dp.max((pf - alt.map_or(0.0, |a| a.1)).abs()),
            }
        }
    }
    Ok((dp, df))
}

/// One line of the verification suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Algebraic verification: teleportation identities, the CNOT resource
/// group and fusion/CZ equivalence.
pub fn algebra_suite<R: Rng + ?Sized>(rng: &mut R) -> Result<Vec<SuiteItem>, StateError> {
    let mut items = Vec::new();
    for (name, u) in [("H", hadamard()), ("T", t_gate())] {
        let r = single_qubit_teleportation(u, rng)?;
        items.push(SuiteItem {
            name: format!("single-qubit teleportation U={name}"),
            passed: r.passed() && r.cases.len() == 4,
            detail: format!("4 outcomes, max infidelity {:.2e}", r.max_infidelity()),
        });
    }
    let mut worst = 0.0f64;
    let mut all = true;
    for _ in 0..50 {
        let r = single_qubit_teleportation(random_unitary(rng), rng)?;
        worst = worst.max(r.max_infidelity());
        all &= r.passed() && r.cases.len() == 4;
    }
    items.push(SuiteItem {
        name: "single-qubit teleportation, 50 Haar-random U".into(),
        passed: all,
        detail: format!("200 cases, max infidelity {worst:.2e}"),
    });
    let r = cnot_teleportation(20, rng)?;
    items.push(SuiteItem {
        name: "CNOT teleportation, 16 outcomes x 20 inputs".into(),
        passed: r.passed() && r.cases.len() == 320,
        detail: format!("{} cases, max infidelity {:.2e}", r.cases.len(), r.max_infidelity()),
    });
    let dev = cnot_ancilla_deviation();
    items.push(SuiteItem {
        name: "CNOT ancilla stabilized by the linear-cluster group".into(),
        passed: dev < 1e-10,
        detail: format!("max |<g> - 1| = {dev:.2e}"),
    });
    let (mut dp, mut df) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = rng.random_range(2..=6);
        let s = StateVector::random(n, rng)?;
        let q1 = rng.random_range(0..n);
        let q2 = (q1 + rng.random_range(1..n)) % n;
        let (a, b) = fusion_cz_deviation(&s, q1, q2)?;
        dp = dp.max(a);
        df = df.max(b);
    }
    items.push(SuiteItem {
        name: "fusion equals CZ then X measurements, 100 random states".into(),
        passed: dp < 1e-10 && df < 1e-10,
        detail: format!("max probability diff {dp:.2e}, max infidelity {df:.2e}"),
    });
    Ok(items)
}

/// Counts from [`cyclization_check`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CyclizationReport {
    pub runs: usize,
    /// Runs whose output equaled `P · Π_± |Φ⟩` for some Pauli `P`.
    pub cyclized_matches: usize,
    pub plain_matches: usize,
    /// Runs in which every check of the cyclized network had its expected sign.
    pub checks_satisfied: usize,
    /// `[network][s]`: how often the `(-1)^s` eigenspace of `Z⊗4` was projected
    /// onto, for the cyclized (0) and plain (1) network.
    pub projections: [[usize; 2]; 2],
    pub num_checks: usize,
}

impl CyclizationReport {
    pub fn passed(&self) -> bool {
        self.runs > 0
            && self.num_checks > 0
            && self.cyclized_matches == self.runs
            && self.plain_matches == self.runs
            && self.checks_satisfied == self.runs
            && self.projections.iter().all(|p| p[0] > 0 && p[1] > 0)
    }
}

fn choi(pairs: usize) -> Result<StateVector, StateError> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let bell = StateVector::from_amplitudes(vec![h, z, z, h])?;
    let mut s = bell.clone();
    for _ in 1..pairs {
        s = s.tensor(&bell)?;
    }
    Ok(s)
}

/// Every `P · Π_s |Φ⟩` for Paulis `P` on the outputs, tagged with `s`, where
/// `|Φ⟩` is the Choi state with references `0..4` and outputs `4..8`.
fn parity_candidates(targets: &[StateVector; 2]) -> Result<Vec<(usize, StateVector)>, StateError> {
    let mut out = Vec::with_capacity(512);
    for (s, target) in targets.iter().enumerate() {
        for code in 0..256usize {
            let mut p = String::from("IIII");
            for q in 0..4 {
                p.push(['I', 'X', 'Y', 'Z'][code >> (2 * q) & 3]);
            }
            let pauli: PauliOperator = p.parse().expect("valid Pauli string");
            out.push((s, target.apply_pauli(&pauli)?));
        }
    }
    Ok(out)
}

/// Simulates the transpiled `Z⊗4` parity-check network with and without
/// cyclization on one half of four Bell pairs. Every run must leave the
/// outputs in `P · Π_± |Φ⟩` and satisfy all checks of the cyclized network.
pub fn cyclization_check<R: Rng + ?Sized>(runs: usize, rng: &mut R) -> Result<CyclizationReport, NetworkError> {
    let plain = transpile(&CircuitIR::parity_check(Basis::Z, 4))?;
    let cyclized = cyclize(&plain)?;
    let checks = compute_check_group(&cyclized)?;
    let phi = choi(4)?.permute(&[0, 2, 4, 6, 1, 3, 5, 7])?;
    let zzzz: PauliOperator = "IIIIZZZZ".parse().expect("valid Pauli string");
    let zphi = phi.apply_pauli(&zzzz)?;
    let targets = [0usize, 1].map(|s| {
        let sign = if s == 0 { 1.0 } else { -1.0 };
        let amps = phi.amplitudes().iter().zip(zphi.amplitudes()).map(|(a, b)| (a + b * sign) * 0.5).collect();
        StateVector::from_amplitudes(amps).expect("non-zero projection")
    });
    let candidates = parity_candidates(&targets)?;
    let mut report = CyclizationReport { runs, num_checks: checks.checks.len(), ..Default::default() };
    for (which, net) in [&cyclized, &plain].into_iter().enumerate() {
        let n = net.num_qubits();
        let mut ports = Vec::new();
        let mut ends = Vec::new();
        for line in net.lines().iter().filter(|l| l.measured.is_none() && net.inputs().contains(&l.start)) {
            ports.push(line.start);
            ends.push(line.end);
        }
        if ports.len() != 4 {
            return Err(NetworkError::Invalid(format!("expected 4 data wires, found {}", ports.len())));
        }
        let labels: Vec<usize> = (0..4).flat_map(|j| [n + j, ports[j]]).collect();
        for _ in 0..runs {
            let run = simulate_network(net, choi(4)?, labels.clone(), rng)?;
            let order: Vec<usize> = (0..4)
                .map(|j| n + j)
                .chain(ends.iter().copied())
                .map(|l| run.labels.iter().position(|&x| x == l).expect("live output"))
                .collect();
            let out = run.state.permute(&order)?;
            let mut found = None;
            for (s, cand) in &candidates {
                if cand.overlap(&out)? > 1.0 - 1e-9 {
                    found = Some(*s);
                    break;
                }
            }
            if let Some(s) = found {
                report.projections[which][s] += 1;
                if which == 0 {
                    report.cyclized_matches += 1;
                } else {
                    report.plain_matches += 1;
                }
            }
            if which == 0 {
                let ok = checks.checks.iter().all(|c| {
                    let parity = c.decomposition.iter().map(|&j| run.outcomes[j] as usize).sum::<usize>() % 2;
                    (if parity == 0 { 1 } else { -1 }) == c.expected_sign
                });
                report.checks_satisfied += usize::from(ok);
            }
        }
    }
    Ok(report)
}

/// Summary of [`validate_check_group`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckGroupValidation {
    pub dimension: usize,
    /// Rank of `R ∩ F` computed by Zassenhaus intersection.
    pub intersection_rank: usize,
    pub checks: usize,
    pub negative_signs: usize,
    /// Checks whose listed observables do not multiply back to the operator
    /// (under `in_span` against `F`) or whose sign disagrees with `R`.
    pub invalid: usize,
}

impl CheckGroupValidation {
    pub fn passed(&self) -> bool {
        self.dimension > 0 && self.dimension == self.intersection_rank && self.negative_signs == 0 && self.invalid == 0
    }
}

/// Recomputes `C = R ∩ F` by intersection and checks every generator of
/// `cg` against `F` and `R` independently.
pub fn validate_check_group(net: &FusionNetwork, cg: &CheckGroup) -> Result<CheckGroupValidation, NetworkError> {
    let r = net.resource_group()?;
    let f = net.fusion_group()?;
    let intersection_rank = intersect(&r, &f)?.rank();
    let (rs, fs) = (SpanBasis::new(&r), SpanBasis::new(&f));
    let mut v = CheckGroupValidation { dimension: cg.dimension, intersection_rank, checks: 0, negative_signs: 0, invalid: 0 };
    for c in cg.checks.iter().chain(&cg.global) {
        v.checks += 1;
        if c.expected_sign != 1 {
            v.negative_signs += 1;
        }
        let in_f = fs.decompose(&c.operator)?;
        let in_r = rs.decompose(&c.operator)?;
        let ok = in_f.is_some_and(|d| d.sign == 1 && d.indices == c.decomposition)
            && in_r.is_some_and(|d| d.sign == c.expected_sign);
        if !ok {
            v.invalid += 1;
        }
    }
    Ok(v)
}

/// Fusion-network verification: cyclization semantics by simulation and the
/// check groups of the smallest periodic foliated networks.
pub fn network_suite<R: Rng + ?Sized>(runs: usize, rng: &mut R) -> Result<Vec<SuiteItem>, NetworkError> {
    let mut items = Vec::new();
    let r = cyclization_check(runs, rng)?;
    items.push(SuiteItem {
        name: format!("cyclized Z-check: parity projection and loop check, {runs} runs"),
        passed: r.passed(),
        detail: format!(
            "matches {}/{} (cyclized), {}/{} (plain); checks satisfied {}/{}; projections {:?}",
            r.cyclized_matches, r.runs, r.plain_matches, r.runs, r.checks_satisfied, r.runs, r.projections
        ),
    });
    let z = cyclize(&transpile(&CircuitIR::parity_check(Basis::Z, 4))?)?;
    let cg = compute_check_group(&z)?;
    let v = validate_check_group(&z, &cg)?;
    items.push(SuiteItem {
        name: "cyclized Z-check: loop check in R ∩ F".into(),
        passed: v.passed() && cg.checks.len() == 1 && cg.checks[0].decomposition.len() == 4,
        detail: format!("{} resource qubits, dim C = {}, intersection rank {}", z.num_resource_qubits(), v.dimension, v.intersection_rank),
    });
    for model in [NetworkModel::FourQubit, NetworkModel::TenQubit] {
        let net = build_foliated_network(2, 2, 1, model)?;
        let cg = compute_check_group(&net)?;
        let v = validate_check_group(&net, &cg)?;
        items.push(SuiteItem {
            name: format!("periodic foliated network 2x2x1 ({model:?}): check group"),
            passed: v.passed(),
            detail: format!(
                "dim C = {}, intersection rank {}, {} generators, {} negative, {} invalid",
                v.dimension, v.intersection_rank, v.checks, v.negative_signs, v.invalid
            ),
        });
    }
    Ok(items)
}
