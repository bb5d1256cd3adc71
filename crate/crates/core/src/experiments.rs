//! Orchestrated studies: sign-change location along vertical segments,
//! `(x, T)` sweep tables comparing the restricted mass to its main term,
//! and consolidated check suites.
//!
//! The sign scan follows the de Broglie heuristic: along a vertical
//! line the Eisenstein series oscillates on scale `~y/T`, so a uniform
//! grid with four samples per wavelength (`4T` points per unit height)
//! brackets every sign change, after which bisection sharpens each
//! bracket to the requested resolution.
//!
//! Sweeps honor the `EISENREST_THREADS` environment variable (absent
//! means one worker).  Cells are computed by a work-claiming pool, but
//! rows are handed to the sink strictly in row-major `(x, T)` order, so
//! a fixed configuration reproduces identical output bytes at thread
//! count 1 — and, since each row is computed independently of the
//! others, in practice at any thread count.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use num_complex::Complex64;

use crate::arithmetic::{bq, bq_prime_closed_form, dirichlet_approx, factorize};
use crate::eisenstein::{eval_star, EisensteinParams};
use crate::quadrature::gl_grid;
use crate::restriction::{
    diagonal_sum_check, diagonal_window, i_psi, j0_series_identity, main_term, parseval_check,
    TestFunction,
};
use crate::special::{bessel_k_imag_scaled_many, gamma_v_scaled};
use crate::{Error, Result};

/// One sign-change bracket `[y_lo, y_hi]` with the straddling values.
#[derive(Debug, Clone, Copy)]
pub struct SignChangeBracket {
    pub y_lo: f64,
    pub y_hi: f64,
    /// `E*(x + i·y_lo)`; opposite sign to `value_hi`.
    pub value_lo: f64,
    pub value_hi: f64,
}

/// Outcome of a sign scan along one vertical segment.
#[derive(Debug, Clone)]
pub struct SignChangeReport {
    /// All brackets found, in increasing `y` order (possibly empty: the
    /// sign-change guarantee is asymptotic in `T` with a nonconstructive
    /// onset, so absence at small `T` is reported, not treated as error).
    pub brackets: Vec<SignChangeBracket>,
    /// Eisenstein evaluations spent (grid plus bisection).
    pub evaluations: u64,
}

/// Locate sign changes of `y ↦ E*(x + iy)` on `[alpha, beta]`.
///
/// Scans a uniform grid of spacing
/// `<= max(resolution, (beta−alpha)/max(64, 4T))`, then bisects each
/// sign-alternating cell until its width is `<= resolution`.
///
/// # Errors
///
/// `Error::Domain` for a degenerate segment or a resolution below
/// `1e-6·(beta−alpha)`; propagated evaluation errors.
pub fn find_sign_change(
    x: f64,
    alpha: f64,
    beta: f64,
    resolution: f64,
    params: &EisensteinParams,
) -> Result<SignChangeReport> {
    if !alpha.is_finite() || !beta.is_finite() || alpha < 1e-3 || beta <= alpha {
        return Err(Error::Domain {
            op: "find_sign_change",
            detail: format!("need 1e-3 <= alpha < beta, got alpha = {alpha}, beta = {beta}"),
        });
    }
    let span = beta - alpha;
    if !resolution.is_finite() || resolution < 1e-6 * span {
        return Err(Error::Domain {
            op: "find_sign_change",
            detail: format!("resolution = {resolution} below 1e-6*(beta-alpha) = {:e}", 1e-6 * span),
        });
    }
    let spacing_cap = resolution.max(span / (4.0 * params.t).max(64.0));
    let cells = ((span / spacing_cap).ceil() as usize).max(1);
    let step = span / cells as f64;
    let mut evaluations = 0u64;
    let mut eval = |y: f64| -> Result<f64> {
        evaluations += 1;
        Ok(eval_star(x, y, params)?.value)
    };
    let mut brackets = Vec::new();
    let mut y_prev = alpha;
    let mut v_prev = eval(alpha)?;
    for i in 1..=cells {
        let y = if i == cells { beta } else { alpha + i as f64 * step };
        let v = eval(y)?;
        if v_prev * v < 0.0 {
            let (mut lo, mut hi, mut v_lo, mut v_hi) = (y_prev, y, v_prev, v);
            while hi - lo > resolution {
                let mut mid = 0.5 * (lo + hi);
                let mut v_mid = eval(mid)?;
                if v_mid == 0.0 {
                    // An exact zero cannot straddle; nudge off it once.
                    mid += 1e-3 * (hi - lo);
                    v_mid = eval(mid)?;
                    if v_mid == 0.0 {
                        break;
                    }
                }
                if v_lo * v_mid < 0.0 {
                    hi = mid;
                    v_hi = v_mid;
                } else {
                    lo = mid;
                    v_lo = v_mid;
                }
            }
            brackets.push(SignChangeBracket {
                y_lo: lo,
                y_hi: hi,
                value_lo: v_lo,
                value_hi: v_hi,
            });
        }
        y_prev = y;
        v_prev = v;
    }
    Ok(SignChangeReport {
        brackets,
        evaluations,
    })
}

/// One `(x, T)` cell of a sweep table.  `f64::NAN` marks fields that
/// were not reached because an earlier stage of the row failed; `error`
/// then holds the machine-readable token of the first failure.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    pub t: f64,
    /// Numerator of the Dirichlet approximation of `2x` (0 until computed).
    pub a: i64,
    /// Denominator of the approximation (0 until computed).
    pub q: u64,
    pub theta: f64,
    pub bq_value: f64,
    /// Restricted mass `I_psi(x, T)`.
    pub i_value: f64,
    /// Expected main term at the same point.
    pub main_value: f64,
    /// `i_value / main_value`.
    pub ratio: f64,
    /// Node-doubling error estimate of `i_value`.
    pub quad_err: f64,
    /// First failure token (`None` for a clean row).
    pub error: Option<&'static str>,
}

/// Worker count from `EISENREST_THREADS`: absent means 1 (the
/// deterministic default).
///
/// # Errors
///
/// `Error::Domain` if the variable is present but not a positive integer.
pub fn thread_count() -> Result<usize> {
    match std::env::var("EISENREST_THREADS") {
        Err(_) => Ok(1),
        Ok(raw) => match raw.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Error::Domain {
                op: "thread_count",
                detail: format!("EISENREST_THREADS = {raw:?} is not a positive integer"),
            }),
        },
    }
}

/// Sweep the `(x, T)` product grid, comparing `I_psi` to its main term.
///
/// One row per cell in row-major order (`x` outer, `T` inner); rows are
/// streamed to `sink` as soon as they are ready, always in that order.
/// Per-row failures are recorded in the row's `error` token rather than
/// aborting the sweep.  Worker count comes from [`thread_count`].
///
/// # Errors
///
/// `Error::Domain` for empty grids or a bad thread-count variable; all
/// computational errors stay inside their rows.
pub fn sweep<Q, S>(
    x_grid: &[f64],
    t_grid: &[f64],
    tf: &TestFunction,
    q_rule: Q,
    tol: f64,
    sink: S,
) -> Result<Vec<SweepRow>>
where
    Q: Fn(f64) -> f64 + Sync,
    S: FnMut(&SweepRow),
{
    let threads = thread_count()?;
    sweep_with_threads(x_grid, t_grid, tf, q_rule, tol, threads, sink)
}

/// [`sweep`] with an explicit worker count (1 = fully sequential).
pub fn sweep_with_threads<Q, S>(
    x_grid: &[f64],
    t_grid: &[f64],
    tf: &TestFunction,
    q_rule: Q,
    tol: f64,
    threads: usize,
    mut sink: S,
) -> Result<Vec<SweepRow>>
where
    Q: Fn(f64) -> f64 + Sync,
    S: FnMut(&SweepRow),
{
    if x_grid.is_empty() || t_grid.is_empty() {
        return Err(Error::Domain {
            op: "sweep",
            detail: format!(
                "grids must be nonempty, got |x_grid| = {}, |T_grid| = {}",
                x_grid.len(),
                t_grid.len()
            ),
        });
    }
    // Parameter sets are per-T so the tau cache is shared across all x.
    let params_per_t: Vec<Result<EisensteinParams>> = t_grid
        .iter()
        .map(|&t| EisensteinParams::with_tol(t, tol))
        .collect();
    let nt = t_grid.len();
    let total = x_grid.len() * nt;
    let mut rows = Vec::with_capacity(total);
    if threads <= 1 {
        for &x in x_grid {
            for (ti, &t) in t_grid.iter().enumerate() {
                let row = compute_row(x, t, tf, q_rule(t), &params_per_t[ti]);
                sink(&row);
                rows.push(row);
            }
        }
        return Ok(rows);
    }
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, SweepRow)>();
    std::thread::scope(|scope| {
        for _ in 0..threads.min(total) {
            let tx = tx.clone();
            let next = &next;
            let params_per_t = &params_per_t;
            let q_rule = &q_rule;
            scope.spawn(move || loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= total {
                    break;
                }
                let (x, t) = (x_grid[idx / nt], t_grid[idx % nt]);
                let row = compute_row(x, t, tf, q_rule(t), &params_per_t[idx % nt]);
                if tx.send((idx, row)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        // Emit in row-major order regardless of completion order.
        let mut pending: BTreeMap<usize, SweepRow> = BTreeMap::new();
        let mut next_emit = 0usize;
        for (idx, row) in rx {
            pending.insert(idx, row);
            while let Some(ready) = pending.remove(&next_emit) {
                sink(&ready);
                rows.push(ready);
                next_emit += 1;
            }
        }
    });
    Ok(rows)
}

fn compute_row(
    x: f64,
    t: f64,
    tf: &TestFunction,
    q_cap: f64,
    params: &Result<EisensteinParams>,
) -> SweepRow {
    let mut row = SweepRow {
        x,
        t,
        a: 0,
        q: 0,
        theta: f64::NAN,
        bq_value: f64::NAN,
        i_value: f64::NAN,
        main_value: f64::NAN,
        ratio: f64::NAN,
        quad_err: f64::NAN,
        error: None,
    };
    let params = match params {
        Ok(p) => p,
        Err(e) => {
            row.error = Some(e.token());
            return row;
        }
    };
    match dirichlet_approx(2.0 * x, q_cap) {
        Ok(ap) => {
            row.a = ap.a;
            row.q = ap.q;
            row.theta = ap.theta;
        }
        Err(e) => {
            row.error = Some(e.token());
            return row;
        }
    }
    match bq(row.q, t, 1.0) {
        Ok(v) => row.bq_value = v,
        Err(e) => {
            row.error = Some(e.token());
            return row;
        }
    }
    match i_psi(x, tf, params) {
        Ok(r) => {
            row.i_value = r.value;
            row.quad_err = r.quad_error_est;
        }
        Err(e) => {
            row.error = Some(e.token());
            return row;
        }
    }
    match main_term(x, t, tf, q_cap) {
        Ok(m) => row.main_value = m.value,
        Err(e) => {
            row.error = Some(e.token());
            return row;
        }
    }
    row.ratio = row.i_value / row.main_value;
    row
}

/// Named check suites runnable from the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckSuite {
    /// Mellin transform of the scaled kernel against the closed-form
    /// scaled Gamma factor.
    Mellin,
    /// Parseval identity for the restricted mass.
    Parseval,
    /// Modular invariance `E*(−1/z) = E*(z)` at random points.
    Modular,
    /// Bessel addition-formula identity on the reference grid.
    BesselIdentity,
    /// `B_q` closed form, contraction bound, and `B_1 = 1`.
    Bq,
    /// Divisor-sum asymptotic ratio band with trend table.
    Diagonal,
    /// Union of all suites.
    All,
}

impl CheckSuite {
    /// Parse the CLI token (`mellin`, `parseval`, `modular`,
    /// `bessel_identity`, `bq`, `diagonal`, `all`).
    pub fn parse(name: &str) -> Option<CheckSuite> {
        match name {
            "mellin" => Some(CheckSuite::Mellin),
            "parseval" => Some(CheckSuite::Parseval),
            "modular" => Some(CheckSuite::Modular),
            "bessel_identity" => Some(CheckSuite::BesselIdentity),
            "bq" => Some(CheckSuite::Bq),
            "diagonal" => Some(CheckSuite::Diagonal),
            "all" => Some(CheckSuite::All),
        _ => None,
        }
    }
}

/// One named check: measured residual against its threshold.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    /// Largest residual observed (absolute or relative per the check).
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Aggregated result of [`run_check_suite`].
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub checks: Vec<CheckOutcome>,
    /// Human-readable extras (the diagonal trend table, error details).
    pub notes: Vec<String>,
    /// True iff every check passed.
    pub pass: bool,
}

/// Run a named invariant suite and report residuals; failures are
/// report content, never errors.
pub fn run_check_suite(suite: CheckSuite) -> CheckReport {
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    let run_mellin = matches!(suite, CheckSuite::Mellin | CheckSuite::All);
    let run_parseval = matches!(suite, CheckSuite::Parseval | CheckSuite::All);
    let run_modular = matches!(suite, CheckSuite::Modular | CheckSuite::All);
    let run_bessel = matches!(suite, CheckSuite::BesselIdentity | CheckSuite::All);
    let run_bq = matches!(suite, CheckSuite::Bq | CheckSuite::All);
    let run_diagonal = matches!(suite, CheckSuite::Diagonal | CheckSuite::All);
    if run_mellin {
        checks.push(outcome("mellin-gamma", 1e-8, mellin_gamma_residual(&mut notes)));
    }
    if run_parseval {
        checks.push(outcome("parseval", 1e-4, parseval_residual(&mut notes)));
    }
    if run_modular {
        checks.push(outcome("modular-invariance", 1e-6, modular_residual(&mut notes)));
    }
    if run_bessel {
        checks.push(outcome("bessel-addition", 1e-10, Ok(bessel_identity_residual())));
    }
    if run_bq {
        checks.push(outcome("bq-prime-closed-form", 1e-12, bq_prime_residual(&mut notes)));
        checks.push(outcome("bq-contraction", 1.0, bq_contraction_residual(&mut notes)));
        checks.push(outcome("bq-at-one", 0.0, bq_at_one_residual(&mut notes)));
    }
    if run_diagonal {
        checks.push(outcome("diagonal-ratio-band", 0.5, diagonal_residual(&mut notes)));
    }
    let pass = checks.iter().all(|c| c.pass);
    CheckReport {
        checks,
        notes,
        pass,
    }
}

fn outcome(name: &'static str, threshold: f64, residual: Result<f64>) -> CheckOutcome {
    match residual {
        Ok(residual) => CheckOutcome {
            name,
            residual,
            threshold,
            pass: residual <= threshold,
        },
        Err(_) => CheckOutcome {
            name,
            residual: f64::INFINITY,
            threshold,
            pass: false,
        },
    }
}

/// SplitMix64: tiny fixed-seed generator so the built-in suites are
/// reproducible without pulling a randomness dependency into the
/// library.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * ((self.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

/// Max relative gap between the numerical Mellin transform
/// `∫ S_V(T, 2πy)·y^{s−1/2}·dy/y` and the scaled Gamma closed form, over
/// `T ∈ {5, 20, 50}` and five real `s`.
///
/// In `u = log y` the integrand is `S_V(T, 2πe^u)·e^{(s−1/2)u}`: it
/// oscillates at `~T/2π` cycles per unit below the turning point,
/// dies like `e^{(s−1/2)u}` on the left, and decays past the turning
/// point with exponent `η(w) = √(w²−T²) − T·arccosh(w/T)` (`w = 2πe^u`).
/// The window ends where `η` beats the `e^{(s−1/2)u}` amplification by
/// `e^{-42}`; ten nodes per radian-or-e-fold of the fastest local scale
/// (`≤ w_max` in `u`-coordinates) keeps every 16-point panel
/// superexponentially accurate.
fn mellin_gamma_residual(notes: &mut Vec<String>) -> Result<f64> {
    const S_MAX: f64 = 4.0;
    let mut worst = 0.0f64;
    for &t in &[5.0f64, 20.0, 50.0] {
        let mut w_max = t * 1.05;
        loop {
            let r = w_max / t;
            let eta = t * ((r * r - 1.0).sqrt() - r.acosh());
            if eta - (S_MAX - 0.5) * (w_max / (2.0 * PI)).ln().max(0.0) > 42.0 {
                break;
            }
            w_max *= 1.05;
        }
        let u_lo = -45.0;
        let u_hi = (w_max / (2.0 * PI)).ln();
        let rate = w_max / (2.0 * PI) * 10.0 + 20.0;
        let points = ((u_hi - u_lo) * rate).ceil() as usize;
        let (us, ws) = gl_grid(u_lo, u_hi, points);
        let args: Vec<f64> = us.iter().map(|u| 2.0 * PI * u.exp()).collect();
        let kernel = bessel_k_imag_scaled_many(t, &args, 1e-11)?;
        for &s in &[1.5, 2.0, 2.5, 3.0, 4.0] {
            let mut sum = 0.0f64;
            let mut comp = 0.0f64;
            for ((u, w), k) in us.iter().zip(&ws).zip(&kernel) {
                let term = w * k.value * ((s - 0.5) * u).exp();
                let fresh = term + comp;
                let acc = sum + fresh;
                comp = fresh - (acc - sum);
                sum = acc;
            }
            let closed = gamma_v_scaled(Complex64::new(s, 0.0), t)?.re;
            let rel = (sum - closed).abs() / closed.abs();
            if rel > worst {
                worst = rel;
                notes.push(format!(
                    "mellin-gamma worst so far: T = {t}, s = {s}: quadrature {sum:.12e} vs closed {closed:.12e} (rel {rel:.3e})"
                ));
            }
        }
    }
    Ok(worst)
}

/// Max Parseval `rel_gap` at `T = 20`, `x ∈ {0, 0.35}`, `t_max = 220`.
fn parseval_residual(notes: &mut Vec<String>) -> Result<f64> {
    let tf = TestFunction::default_segment();
    let params = EisensteinParams::new(20.0)?;
    let mut worst = 0.0f64;
    for &x in &[0.0, 0.35] {
        let check = parseval_check(x, &tf, 220.0, &params)?;
        notes.push(format!(
            "parseval x = {x}: lhs {:.12e}, rhs {:.12e}, rel_gap {:.3e}",
            check.lhs, check.rhs, check.rel_gap
        ));
        worst = worst.max(check.rel_gap);
    }
    Ok(worst)
}

/// Max modular-invariance defect `|E*(−1/z) − E*(z)|/max(1, |E*(z)|)`
/// over 20 fixed pseudo-random `z` per `T ∈ {10, 30}`.
fn modular_residual(notes: &mut Vec<String>) -> Result<f64> {
    let mut rng = SplitMix64(0xe15e_57a1);
    let mut worst = 0.0f64;
    for &t in &[10.0, 30.0] {
        let params = EisensteinParams::new(t)?;
        for _ in 0..20 {
            let x = rng.uniform(-0.5, 0.5);
            let y = rng.uniform(0.8, 2.0);
            let norm_sq = x * x + y * y;
            let direct = eval_star(x, y, &params)?.value;
            let inverted = eval_star(-x / norm_sq, y / norm_sq, &params)?.value;
            let gap = (direct - inverted).abs() / direct.abs().max(1.0);
            worst = worst.max(gap);
        }
    }
    notes.push(format!("modular-invariance worst defect {worst:.3e}"));
    Ok(worst)
}

/// Max `abs_gap` of the Bessel addition identity on the 5×5 grid
/// `a, u ∈ {0, 1.25, 2.5, 3.75, 5}` with `L = 60`.
fn bessel_identity_residual() -> f64 {
    let grid = [0.0, 1.25, 2.5, 3.75, 5.0];
    let mut worst = 0.0f64;
    for &a in &grid {
        for &u in &grid {
            worst = worst.max(j0_series_identity(a, u, 60).abs_gap);
        }
    }
    worst
}

/// Max defect of the prime closed form over 100 fixed pseudo-random
/// `(p, T)` pairs.
fn bq_prime_residual(notes: &mut Vec<String>) -> Result<f64> {
    let mut rng = SplitMix64(0xb9_0b9);
    let mut worst = 0.0f64;
    let mut trials = 0;
    while trials < 100 {
        let p = 2 + rng.below(9_999);
        let f = factorize(p)?;
        if f.factors.len() != 1 || f.factors[0].1 != 1 {
            continue; // not prime; redraw
        }
        trials += 1;
        let t = rng.uniform(0.5, 1000.0);
        let gap = (bq(p, t, 1.0)? - bq_prime_closed_form(p, t)?).abs();
        worst = worst.max(gap);
    }
    notes.push(format!("bq prime closed-form worst gap {worst:.3e}"));
    Ok(worst)
}

/// Max `|B_q(1, T)|` over 1000 fixed pseudo-random `q ∈ [2, 10^4]`.
fn bq_contraction_residual(notes: &mut Vec<String>) -> Result<f64> {
    let mut rng = SplitMix64(0xc0_47ac);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let q = 2 + rng.below(9_999);
        let t = rng.uniform(1.0, 1000.0);
        worst = worst.max(bq(q, t, 1.0)?.abs());
    }
    notes.push(format!("bq contraction: max |B_q| = {worst:.15}"));
    Ok(worst)
}

/// `|B_1 − 1|`; the empty Euler product must be exactly 1.
fn bq_at_one_residual(_notes: &mut Vec<String>) -> Result<f64> {
    Ok((bq(1, 7.7, 1.0)? - 1.0).abs())
}

/// `|ratio − 1|` at `T = 50`, `N = 2^16`, with the `N = 2^{10..16}`
/// trend table pushed into the notes.
fn diagonal_residual(notes: &mut Vec<String>) -> Result<f64> {
    let mut final_ratio = f64::NAN;
    notes.push("diagonal trend (T = 50):      N        lhs           main          ratio".into());
    for k in 10..=16 {
        let n = 1u64 << k;
        let check = diagonal_sum_check(n, 50.0, diagonal_window)?;
        notes.push(format!(
            "diagonal trend (T = 50): 2^{k:2} {:>14.6e} {:>14.6e} {:>8.5}",
            check.lhs, check.main, check.ratio
        ));
        if k == 16 {
            final_ratio = check.ratio;
        }
    }
    Ok((final_ratio - 1.0).abs())
}
