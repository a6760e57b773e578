use clap::ValueEnum;
use nalgebra::DVector;
use num_complex::Complex64;
use qexp::channel::{
    choi_state, kraus_from_choi, max_abs_diff, random_channel, random_state, random_unitary,
    DenseOperator, ErrorBasis, ErrorDistribution, QuantumChannel,
};
use qexp::exponent::{
    amplitude_damping_bound, bound_comparison_seeded, capacity_lower_bound, exponent,
    exponent_objective, p_prime_seeded, tilted_family_minimum, SOLVER_AGREEMENT,
};
use qexp::gfsym::{
    enumerate_self_orthogonal, is_coset_leader_set, min_entropy_coset_leaders, symplectic_form,
    type_census, witt_ratio_census, SymplecticSubspace, SymplecticVector,
};
use qexp::simkit::{
    build_codes, build_recovery, enlarge_correctable_set, fidelity_report, preskill_lower_bound,
    state_fidelity, FidelityModel, SearchOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::output::{num, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Gfsym,
    Channel,
    Exponent,
    Simkit,
    All,
}

/// Summary of one invariant: the smallest margin by which it held over all
/// trials. Exact checks report 0 when they hold and -1 when they fail.
#[derive(Debug, Clone)]
pub struct Line {
    pub name: &'static str,
    pub trials: usize,
    pub worst_slack: f64,
}

impl Line {
    pub fn passed(&self) -> bool {
        self.worst_slack >= 0.0
    }
}

struct Tally {
    name: &'static str,
    trials: usize,
    worst: f64,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            trials: 0,
            worst: f64::INFINITY,
        }
    }

    /// NaN counts as a failure.
    fn record(&mut self, slack: f64) {
        self.trials += 1;
        self.worst = if slack.is_nan() {
            f64::NEG_INFINITY
        } else {
            self.worst.min(slack)
        };
    }

    fn exact(&mut self, ok: bool) {
        self.record(if ok { 0.0 } else { -1.0 });
    }

    fn line(self) -> Line {
        Line {
            name: self.name,
            trials: self.trials,
            worst_slack: if self.trials == 0 {
                f64::NEG_INFINITY
            } else {
                self.worst
            },
        }
    }
}

pub fn run(suite: Suite, seed: u64) -> Vec<Line> {
    let mut lines = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Gfsym {
        lines.extend(gfsym(seed));
    }
    if all || suite == Suite::Channel {
        lines.extend(channel(seed));
    }
    if all || suite == Suite::Exponent {
        lines.extend(exponent_suite(seed));
    }
    if all || suite == Suite::Simkit {
        lines.extend(simkit(seed));
    }
    lines
}

pub fn table(lines: &[Line]) -> Table {
    let mut t = Table::new(
        ["invariant", "trials", "worst_slack", "status"]
            .map(String::from)
            .to_vec(),
    );
    for l in lines {
        t.rows.push(vec![
            l.name.to_string(),
            l.trials.to_string(),
            num(l.worst_slack),
            if l.passed() { "pass" } else { "FAIL" }.to_string(),
        ]);
    }
    t
}

/// Independent stream per battery so suites do not shift each other.
fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn random_vector(rng: &mut ChaCha8Rng, d: u32, n: usize) -> SymplecticVector {
    SymplecticVector::new(d, (0..2 * n).map(|_| rng.random_range(0..d)).collect())
        .expect("valid coords")
}

/// A random distribution on `d^2` symbols; with `sparse`, each entry is
/// zeroed with probability 1/4 (at least one is kept).
fn random_distribution(rng: &mut ChaCha8Rng, d: u32, sparse: bool) -> ErrorDistribution {
    let size = (d * d) as usize;
    let mut w: Vec<f64> = (0..size)
        .map(|_| {
            let x = -(1.0 - rng.random::<f64>()).ln();
            if sparse && rng.random::<f64>() < 0.25 {
                0.0
            } else {
                x
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.random_range(0..size)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    ErrorDistribution::new(d, w.into_iter().map(|x| x / total).collect()).expect("normalized")
}

/// A random channel drawn through its Choi state.
fn random_choi_channel(rng: &mut ChaCha8Rng, d: u32) -> QuantumChannel {
    let k = rng.random_range(1..=(d * d) as usize);
    let ch = random_channel(d, 1, k, rng).expect("small channel");
    kraus_from_choi(&choi_state(&ch).expect("CP"), d).expect("valid Choi state")
}

fn gfsym(seed: u64) -> Vec<Line> {
    let mut rng = rng(seed, 1);
    let form = |x: &SymplecticVector, y: &SymplecticVector| {
        symplectic_form(x, y).expect("same shape").value()
    };

    let mut bilinear = Tally::new("gfsym.bilinearity");
    let mut antisym = Tally::new("gfsym.antisymmetry");
    for t in 0..1000 {
        let d = [2, 3, 5][t % 3];
        let n = rng.random_range(1..=4);
        let (x, y, z) = (
            random_vector(&mut rng, d, n),
            random_vector(&mut rng, d, n),
            random_vector(&mut rng, d, n),
        );
        let (a, b) = (rng.random_range(0..d), rng.random_range(0..d));
        let lhs = form(&x.scale(a).add(&y.scale(b)).expect("same shape"), &z);
        let rhs = (a * form(&x, &z) + b * form(&y, &z)) % d;
        bilinear.exact(lhs == rhs);
        antisym.exact((form(&x, &y) + form(&y, &x)) % d == 0 && form(&x, &x) == 0);
    }

    let mut duality = Tally::new("gfsym.duality_involution");
    for t in 0..100 {
        let d = [2, 3][t % 2];
        let n = rng.random_range(1..=3);
        let count = rng.random_range(0..=2 * n);
        let vs: Vec<_> = (0..count).map(|_| random_vector(&mut rng, d, n)).collect();
        let l = SymplecticSubspace::span(d, n, &vs).expect("valid span");
        let dual = l.dual();
        duality.exact(dual.dual() == l && l.dim() + dual.dim() == 2 * n);
    }

    let mut leaders = Tally::new("gfsym.coset_leader_validity");
    for (n, k, d) in [(2, 1, 2), (2, 2, 2), (3, 1, 2), (2, 1, 3)] {
        let subspaces: Vec<_> = enumerate_self_orthogonal(n, k, d).expect("small").collect();
        for l in subspaces.iter().step_by(subspaces.len().div_ceil(12)) {
            let ls = min_entropy_coset_leaders(l, &[]).expect("small");
            let dual = l.dual();
            let distinct = ls.iter().enumerate().all(|(i, x)| {
                ls[i + 1..]
                    .iter()
                    .all(|y| !dual.contains(&y.sub(x).expect("same shape")))
            });
            leaders.exact(
                distinct && ls.len() == (d as usize).pow(k as u32) && is_coset_leader_set(l, &ls),
            );
        }
    }

    let mut witt = Tally::new("gfsym.witt_census");
    for (n, k, d) in [(2, 1, 2), (3, 1, 2), (3, 2, 2), (2, 1, 3)] {
        let census = witt_ratio_census(n, k, d).expect("small census");
        witt.exact(census.matches());
    }

    let mut count = Tally::new("gfsym.type_count_bound");
    let mut size = Tally::new("gfsym.type_class_bound");
    let mut total = Tally::new("gfsym.type_class_total");
    for n in 1..=6 {
        let census = type_census(2, n).expect("small census");
        count.record((n as f64 + 1.0).powi(3) - census.num_types() as f64);
        for class in &census.classes {
            size.record(n as f64 * class.entropy - (class.size as f64).log2() + 1e-12);
        }
        total.exact(census.total() == 4u64.pow(n as u32));
    }

    [
        bilinear, antisym, duality, leaders, witt, count, size, total,
    ]
    .map(Tally::line)
    .to_vec()
}

fn random_operator(rng: &mut ChaCha8Rng, dim: usize) -> DenseOperator {
    DenseOperator::from_fn(dim, dim, |_, _| {
        Complex64::new(
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
        )
    })
}

fn channel(seed: u64) -> Vec<Line> {
    let mut rng = rng(seed, 2);

    let mut ortho = Tally::new("channel.basis_orthonormality");
    for d in [2, 3, 5] {
        let b = ErrorBasis::standard(d).expect("prime");
        for (u, nu) in b.operators().iter().enumerate() {
            for (v, nv) in b.operators().iter().enumerate() {
                let want = if u == v { 1.0 } else { 0.0 };
                ortho.record(1e-12 - (b.inner(nu, nv) - want).norm());
            }
        }
    }

    let mut independence = Tally::new("channel.representation_independence");
    let mut normalization = Tally::new("channel.probability_normalization");
    let mut choi = Tally::new("channel.choi_round_trip");
    for t in 0..50 {
        let (d, m) = [(2, 1), (3, 1), (2, 2)][t % 3];
        let dim = (d as usize).pow(m as u32);
        let k = rng.random_range(1..=dim.min(6));
        let ch = random_channel(d, m, k, &mut rng).expect("small channel");
        let basis = ErrorBasis::standard(d).expect("prime");
        let extra = rng.random_range(0..=2);
        let v = random_unitary(k + extra, &mut rng)
            .columns(0, k)
            .into_owned();
        let mixed = ch.mix_kraus(&v).expect("isometry");
        let (p, q) = if m == 1 {
            (
                ch.error_distribution(&basis).expect("valid"),
                mixed.error_distribution(&basis).expect("valid"),
            )
        } else {
            // Two-qudit channels are compared through their Choi states.
            let diff = max_abs_diff(
                &choi_state(&ch).expect("CP"),
                &choi_state(&mixed).expect("CP"),
            );
            independence.record(1e-10 - diff);
            continue;
        };
        let diff = p
            .probs()
            .iter()
            .zip(q.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        independence.record(1e-10 - diff);
        let mass: f64 = ch
            .expansion(&basis)
            .expect("valid")
            .iter()
            .flatten()
            .map(|a| a.norm_sqr())
            .sum();
        normalization.record(1e-9 - (mass - 1.0).abs());
        let c = choi_state(&ch).expect("CP");
        let back = choi_state(&kraus_from_choi(&c, d).expect("valid")).expect("CP");
        choi.record(1e-9 - max_abs_diff(&c, &back));
    }
    for gamma in (0..=10).map(|i| i as f64 / 10.0) {
        let basis = ErrorBasis::standard(2).expect("prime");
        for ch in [
            QuantumChannel::amplitude_damping(gamma),
            QuantumChannel::depolarizing(gamma),
            QuantumChannel::dephasing(gamma),
        ] {
            let ch = ch.expect("valid parameter");
            let mass: f64 = ch
                .expansion(&basis)
                .expect("valid")
                .iter()
                .flatten()
                .map(|a| a.norm_sqr())
                .sum();
            normalization.record(1e-9 - (mass - 1.0).abs());
        }
    }

    let mut expansion = Tally::new("channel.expansion_round_trip");
    for t in 0..100 {
        let d = [2, 3, 5][t % 3];
        let b = ErrorBasis::standard(d).expect("prime");
        let a = random_operator(&mut rng, d as usize);
        let back = b.reconstruct(&b.expand(&a).expect("square"));
        expansion.record(1e-12 - max_abs_diff(&a, &back));
    }

    [ortho, independence, expansion, choi, normalization]
        .map(Tally::line)
        .to_vec()
}

fn exponent_suite(seed: u64) -> Vec<Line> {
    let mut rng = rng(seed, 3);
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();

    let mut monotone = Tally::new("exponent.monotonicity");
    let mut zero = Tally::new("exponent.zero_set");
    for t in 0..20 {
        let p = random_distribution(&mut rng, 2, t % 2 == 1);
        let cap = capacity_lower_bound(&p);
        let values: Vec<f64> = grid.iter().map(|&r| exponent(r, &p).value).collect();
        for w in values.windows(2) {
            monotone.record(1e-9 - (w[1] - w[0]));
        }
        for (&r, &e) in grid.iter().zip(&values) {
            if r >= cap + 1e-9 {
                zero.record(1e-6 - e);
            } else if r < cap - 0.02 {
                zero.record(e - 1e-12);
            }
        }
    }

    let mut convex = Tally::new("exponent.objective_convexity");
    for t in 0..1000 {
        let d = [2, 3][t % 2];
        let p = random_distribution(&mut rng, d, false);
        let (q1, q2) = (
            random_distribution(&mut rng, d, false),
            random_distribution(&mut rng, d, false),
        );
        let (r, lambda) = (rng.random::<f64>(), rng.random::<f64>());
        let mix = ErrorDistribution::new(
            d,
            q1.probs()
                .iter()
                .zip(q2.probs())
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect(),
        )
        .expect("convex combination");
        let f = |q: &ErrorDistribution| exponent_objective(r, q, &p).expect("same alphabet");
        convex.record(lambda * f(&q1) + (1.0 - lambda) * f(&q2) + 1e-12 - f(&mix));
    }

    let mut agree = Tally::new("exponent.solver_agreement");
    for t in 0..50 {
        let d = [2, 2, 3][t % 3];
        let p = random_distribution(&mut rng, d, t % 2 == 0);
        let r = rng.random::<f64>();
        let diff = (exponent(r, &p).value - tilted_family_minimum(r, &p).value).abs();
        agree.record(SOLVER_AGREEMENT - diff);
    }

    let mut closed_form = Tally::new("exponent.damping_closed_form");
    let mut pprime = Tally::new("exponent.p_prime_closed_form");
    let mut ordering = Tally::new("exponent.capacity_above_rival");
    let basis = ErrorBasis::standard(2).expect("prime");
    for gamma in (0..=100).map(|i| i as f64 / 100.0) {
        let ch = QuantumChannel::amplitude_damping(gamma).expect("valid");
        let direct = capacity_lower_bound(&ch.error_distribution(&basis).expect("valid"));
        closed_form.record(1e-10 - (direct - amplitude_damping_bound(gamma).expect("valid")).abs());
        let pp = p_prime_seeded(&ch, 16, seed).expect("qubit");
        let closed = 1.0 - (2.0 - gamma + 2.0 * (1.0 - gamma).sqrt()) / 4.0;
        pprime.record(1e-6 - (pp.p_prime - closed).abs());
        let report = bound_comparison_seeded(&ch, 16, seed).expect("qubit");
        ordering.record(report.capacity_lb - report.rival_lb + 1e-12);
    }

    let mut preprocessed = Tally::new("exponent.preprocessed_bound_inequality");
    for t in 0..200 {
        let ch = random_choi_channel(&mut rng, 2);
        match bound_comparison_seeded(&ch, 16, seed ^ t) {
            Ok(report) => preprocessed.record(report.slack() + 1e-8),
            Err(_) => preprocessed.exact(false),
        }
    }

    [
        monotone,
        zero,
        convex,
        agree,
        closed_form,
        pprime,
        ordering,
        preprocessed,
    ]
    .map(Tally::line)
    .to_vec()
}

fn simkit(seed: u64) -> Vec<Line> {
    let mut rng = rng(seed, 4);
    let stabilizers: Vec<SymplecticSubspace> = [
        (2, vec!["0101"]),
        (2, vec!["0101", "1010"]),
        (2, vec!["010100", "000101"]),
        (2, vec!["111111"]),
        (3, vec!["1020"]),
    ]
    .into_iter()
    .map(|(d, g)| SymplecticSubspace::parse(d, &g).expect("valid generators"))
    .collect();

    let mut eigen = Tally::new("simkit.eigenspace");
    let mut complete = Tally::new("simkit.completeness");
    let mut tp = Tally::new("simkit.recovery_trace_preserving");
    for l in &stabilizers {
        let d = l.modulus();
        let basis = ErrorBasis::standard(d).expect("prime");
        let codes = build_codes(l, &basis).expect("self-orthogonal");
        let dim = (d as usize).pow(l.n() as u32);
        let mut stacked = DenseOperator::zeros(dim, 0);
        for code in &codes {
            for (g, &lambda) in l.basis().iter().zip(code.eigenvalues()) {
                let ng = basis.pauli_string(g).expect("same shape");
                let res = max_abs_diff(&(&ng * code.basis()), &(code.basis() * lambda));
                eigen.record(1e-10 - res);
            }
            let cols = stacked.ncols();
            stacked = stacked.insert_columns(cols, code.dim(), Complex64::new(0.0, 0.0));
            stacked
                .columns_mut(cols, code.dim())
                .copy_from(code.basis());
            let ch = random_choi_channel(&mut rng, d);
            let composed = ch
                .tensor_power(l.n())
                .and_then(|a| a.then(build_recovery(code)?.channel()))
                .expect("small code");
            tp.record(1e-9 - composed.tp_deviation());
        }
        let gram = stacked.adjoint() * &stacked;
        let ortho = max_abs_diff(&gram, &DenseOperator::identity(gram.nrows(), gram.ncols()));
        complete.record(if stacked.ncols() == dim {
            1e-10 - ortho
        } else {
            -1.0
        });
    }

    let mut preskill = Tally::new("simkit.preskill_soundness");
    let by_n: Vec<Vec<SymplecticSubspace>> = (1..=3)
        .map(|n| {
            (0..=n)
                .flat_map(|k| enumerate_self_orthogonal(n, k, 2).expect("small"))
                .collect()
        })
        .collect();
    let basis = ErrorBasis::standard(2).expect("prime");
    for _ in 0..200 {
        let n = rng.random_range(1..=3);
        let l = &by_n[n - 1][rng.random_range(0..by_n[n - 1].len())];
        let codes = build_codes(l, &basis).expect("self-orthogonal");
        let code = &codes[rng.random_range(0..codes.len())];
        let ch = random_choi_channel(&mut rng, 2);
        let rec = build_recovery(code).expect("leaders");
        let coords = random_state(code.dim(), &mut rng);
        let psi = code.basis() * coords;
        let psi = DVector::from_column_slice(psi.as_slice());
        let ch_n = ch.tensor_power(n).expect("small");
        let f = state_fidelity(&psi, &ch_n, &rec).expect("valid state");
        let lb = preskill_lower_bound(&psi, &ch, &basis, rec.leaders()).expect("small");
        preskill.record(f - lb + 1e-8);
    }

    let mut ordering = Tally::new("simkit.fidelity_ordering");
    let opts = SearchOptions {
        starts: 8,
        seed,
        ..Default::default()
    };
    let l = &stabilizers[0];
    let preferred = ["0000", "1000"].map(|s| SymplecticVector::parse(2, s).expect("valid"));
    for t in 0..6 {
        let ch = if t < 3 {
            QuantumChannel::amplitude_damping(0.1 + 0.2 * t as f64).expect("valid")
        } else {
            random_choi_channel(&mut rng, 2)
        };
        for code in build_codes(l, &basis).expect("self-orthogonal") {
            let code = code
                .with_leaders(preferred.to_vec())
                .expect("valid leaders");
            match fidelity_report(&code, &ch, &opts) {
                Ok(r) => {
                    let top = r.entanglement_fidelity.max(r.min_fidelity.value);
                    ordering.record(r.min_avg_fidelity.value + 1e-7 - top);
                }
                Err(_) => ordering.exact(false),
            }
        }
    }

    let mut exact = Tally::new("simkit.pauli_entanglement_exactness");
    let mut lower = Tally::new("simkit.pauli_state_fidelity_floor");
    for t in 0..20 {
        let l = &stabilizers[[0, 2, 3][t % 3]];
        let p = random_distribution(&mut rng, 2, t % 2 == 1);
        let ch = QuantumChannel::pauli(&basis, &p).expect("valid");
        let ch_n = ch.tensor_power(l.n()).expect("small");
        let pn = p.product(l.n()).expect("valid");
        for code in build_codes(l, &basis).expect("self-orthogonal") {
            let rec = build_recovery(&code).expect("leaders");
            let j = enlarge_correctable_set(l, rec.leaders()).expect("distinct leaders");
            let want: f64 = j.iter().map(|x| pn.prob(x).expect("same shape")).sum();
            let model = FidelityModel::new(&code, &ch_n, &rec).expect("same space");
            exact.record(1e-10 - (model.entanglement_fidelity() - want).abs());
            for _ in 0..3 {
                let coords = random_state(code.dim(), &mut rng);
                let psi = code.basis() * coords;
                let psi = DVector::from_column_slice(psi.as_slice());
                lower
                    .record(state_fidelity(&psi, &ch_n, &rec).expect("valid state") - want + 1e-10);
            }
        }
    }

    [eigen, complete, tp, preskill, ordering, exact, lower]
        .map(Tally::line)
        .to_vec()
}
