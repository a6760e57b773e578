use qexp::channel::{ErrorBasis, QuantumChannel};
use qexp::exponent::{
    amplitude_damping_bound, bound_comparison_seeded, capacity_lower_bound, entropy,
    exponent_tilted, fidelity_bound_from_exponent, theorem_bound,
};
use qexp::simkit::{ensemble_check, SearchOptions, StabilizerFile};
use rayon::prelude::*;

use crate::error::{usage, CliResult};
use crate::output::{num, Table};
use crate::source::{ChannelSource, Family};
use crate::sweep::{check_allowed, grid, GridPoint, Setting, SweepSpec};

/// Swept variables other than `skip`, as leading columns.
fn leading(sweeps: &[SweepSpec], skip: &str) -> Vec<usize> {
    (0..sweeps.len())
        .filter(|&i| sweeps[i].variable != skip)
        .collect()
}

fn header(sweeps: &[SweepSpec], cols: &[usize], rest: &[&str]) -> Vec<String> {
    cols.iter()
        .map(|&i| sweeps[i].variable.clone())
        .chain(rest.iter().map(|s| s.to_string()))
        .collect()
}

fn lead_values(point: &GridPoint, cols: &[usize]) -> Vec<String> {
    cols.iter().map(|&i| num(point.swept[i])).collect()
}

/// Evaluates `f` on every grid point in parallel, keeping grid order.
fn run_grid<F>(points: &[GridPoint], f: F) -> CliResult<Vec<Vec<String>>>
where
    F: Fn(&GridPoint) -> CliResult<Vec<Vec<String>>> + Sync + Send,
{
    let rows: Vec<CliResult<Vec<Vec<String>>>> = points.par_iter().map(f).collect();
    let mut out = Vec::new();
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

fn single_system(ch: &QuantumChannel) -> CliResult<()> {
    if ch.m() != 1 {
        return Err(usage(format!(
            "this command needs a single-qudit channel, the input acts on {} qudits",
            ch.m()
        )));
    }
    Ok(())
}

/// Columns: swept parameters, `R, E, H_Qstar, active_branch`, and with
/// `n` set also `fidelity_bound, vacuous`.
pub fn exponent(
    source: &ChannelSource,
    sweeps: &[SweepSpec],
    fixed: &[Setting],
) -> CliResult<Table> {
    let allowed: Vec<&str> = ["R", "n", "k"]
        .iter()
        .chain(source.parameters())
        .copied()
        .collect();
    check_allowed(sweeps, fixed, &allowed)?;
    let points = grid(sweeps, fixed)?;
    let cols = leading(sweeps, "R");
    let with_n = fixed.iter().any(|s| s.key == "n");
    let mut rest = vec!["R", "E", "H_Qstar", "active_branch"];
    if with_n {
        rest.extend(["fidelity_bound", "vacuous"]);
    }
    let mut table = Table::new(header(sweeps, &cols, &rest));
    table.rows = run_grid(&points, |point| {
        let ch = source.channel(point)?;
        single_system(&ch)?;
        let p = ch.error_distribution(&ErrorBasis::standard(ch.modulus())?)?;
        let r = point.require("R")?;
        if !(0.0..=1.0).contains(&r) {
            return Err(usage(format!("rate {r} is not in [0, 1]")));
        }
        let res = exponent_tilted(r, &p)?;
        let mut row = lead_values(point, &cols);
        row.extend([
            num(r),
            num(res.value),
            num(entropy(&res.minimizer)),
            if res.rate_term_active {
                "rate"
            } else {
                "divergence"
            }
            .to_string(),
        ]);
        if with_n {
            let n = point.integer("n")?.unwrap_or(0) as usize;
            let bound = match point.integer("k")? {
                Some(k) => theorem_bound(n, k as usize, r, &p)?,
                None if n >= 1 => fidelity_bound_from_exponent(n, p.modulus(), res.value),
                None => return Err(usage("n must be at least 1")),
            };
            row.extend([num(bound), (bound < 0.0).to_string()]);
        }
        Ok(vec![row])
    })?;
    Ok(table)
}

const BOUND_COLUMNS: [&str; 14] = [
    "capacity_lb",
    "rival_lb",
    "p_prime",
    "preprocessed_lb",
    "damping_closed_form",
    "damping_closed_form_diff",
    "eta0_re",
    "eta0_im",
    "eta1_re",
    "eta1_im",
    "eta2_re",
    "eta2_im",
    "eta3_re",
    "eta3_im",
];

/// Columns: swept parameters then [`BOUND_COLUMNS`]. Qubit-only columns are
/// empty for `d > 2`; the closed-form columns only for amplitude damping.
pub fn bounds(
    source: &ChannelSource,
    sweeps: &[SweepSpec],
    fixed: &[Setting],
    starts: usize,
    seed: u64,
) -> CliResult<Table> {
    check_allowed(sweeps, fixed, source.parameters())?;
    let points = grid(sweeps, fixed)?;
    let cols = leading(sweeps, "");
    let mut table = Table::new(header(sweeps, &cols, &BOUND_COLUMNS));
    let damping = matches!(source, ChannelSource::Family(Family::AmplitudeDamping));
    table.rows = run_grid(&points, |point| {
        let ch = source.channel(point)?;
        single_system(&ch)?;
        let mut row = lead_values(point, &cols);
        if ch.modulus() == 2 {
            let report = bound_comparison_seeded(&ch, starts, seed ^ point.index as u64)?;
            row.extend([
                num(report.capacity_lb),
                num(report.rival_lb),
                num(report.p_prime),
                num(report.preprocessed_lb),
            ]);
            if damping {
                let closed = amplitude_damping_bound(point.require("gamma")?)?;
                row.extend([num(closed), num((closed - report.capacity_lb).abs())]);
            } else {
                row.extend([String::new(), String::new()]);
            }
            for z in report.eta {
                row.extend([num(z.re), num(z.im)]);
            }
        } else {
            let p = ch.error_distribution(&ErrorBasis::standard(ch.modulus())?)?;
            row.push(num(capacity_lower_bound(&p)));
            row.extend(std::iter::repeat_n(String::new(), BOUND_COLUMNS.len() - 1));
        }
        Ok(vec![row])
    })?;
    Ok(table)
}

const SIMULATE_COLUMNS: [&str; 8] = [
    "code",
    "F_min",
    "F_avg",
    "F_e",
    "preskill_lb",
    "rhs",
    "one_minus_rhs",
    "verdict",
];

/// One row per syndrome code and grid point. `rhs` and `verdict` refer to
/// the whole ensemble and repeat on each of its rows.
pub fn simulate(
    source: &ChannelSource,
    stabilizer: &str,
    sweeps: &[SweepSpec],
    fixed: &[Setting],
    enlarge: bool,
    starts: usize,
    seed: u64,
) -> CliResult<Table> {
    check_allowed(sweeps, fixed, source.parameters())?;
    let points = grid(sweeps, fixed)?;
    let cols = leading(sweeps, "");
    let mut table = Table::new(header(sweeps, &cols, &SIMULATE_COLUMNS));
    table.rows = run_grid(&points, |point| {
        let ch = source.channel(point)?;
        single_system(&ch)?;
        let file = StabilizerFile::parse(stabilizer, ch.modulus())?;
        let basis = ErrorBasis::standard(ch.modulus())?;
        let opts = SearchOptions {
            starts,
            seed: seed ^ point.index as u64,
            ..Default::default()
        };
        let report = ensemble_check(
            &file.stabilizer,
            &ch,
            &basis,
            file.leaders.as_deref(),
            enlarge,
            &opts,
        )?;
        Ok(report
            .codes
            .iter()
            .map(|c| {
                let mut row = lead_values(point, &cols);
                row.extend([
                    c.index.to_string(),
                    num(c.min_fidelity),
                    num(c.min_avg_fidelity),
                    num(c.entanglement_fidelity),
                    num(c.preskill_lb),
                    num(report.rhs),
                    num(1.0 - report.rhs),
                    report.verdict.to_string(),
                ]);
                row
            })
            .collect())
    })?;
    Ok(table)
}
