mod output;
mod render;

use clap::{Args, Parser, Subcommand};
use gibbs_core::config::{default_upsilon, Margins, DEFAULT_PRECISION};
use gibbs_core::deform::{deformation, quadratic_like_check, verify_interpolation_identities};
use gibbs_core::dynamics::{boettcher, fixed_points, green_potential, iterate_orbit, trace_external_ray, Angle, QuadraticMap};
use gibbs_core::pressure::{
    bowen_pressure, diameter_decay, enumerate_landing_branches_with, enumerate_return_branches_with, gibbs_mass_report,
    peierls_margin, postcritical_bracket, postcritical_series, preimage_pressure, BranchInventory,
};
use gibbs_core::puzzle::{cantor_data, critical_itinerary, find_parameter, kn_membership};
use gibbs_core::schedule::{
    block_temperature, build_hat_sequence, dominant_block_prediction, hat_scheme, parse_signs, pressure_band,
    project_itinerary, schedule_from_temperatures, signs_to_string, Sign,
};
use gibbs_core::series::{brute_force_oracle, verify_appendix_lemmas, PartitionScheme};
use gibbs_core::Complex64;
use output::Format;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use render::{Scene, View};
use rug::Integer;
use serde::Serialize;
use serde_json::{json, Value};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "gibbs", version, about = "Zero-temperature Gibbs state workbench for real quadratic maps")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Working precision in bits for the extended-precision evaluators.
    #[arg(long, global = true, env = "GIBBS_PRECISION", default_value_t = DEFAULT_PRECISION)]
    precision: u32,
    /// Constant of the postcritical bracket.
    #[arg(long, global = true, default_value_t = Margins::default().d1)]
    d1: f64,
    /// Margin entering the exponent ξ.
    #[arg(long, global = true, default_value_t = Margins::default().d2)]
    d2: f64,
    /// Distortion margin widening branch derivative bounds.
    #[arg(long, global = true, default_value_t = Margins::default().d3)]
    d3: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Report destination; stdout when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Clone)]
struct Param {
    /// A real parameter, or `found` for the parameter searched with --n and an
    /// all-zero prefix of length 6.
    #[arg(long, allow_hyphen_values = true)]
    c: String,
    #[arg(long, default_value_t = 8)]
    n: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// External ray at a rational angle.
    Ray {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        c_im: f64,
        #[arg(long, default_value = "1/3")]
        angle: String,
        #[arg(long, default_value_t = 1e-6)]
        v_min: f64,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
    },
    /// Fixed points α, β and their multipliers.
    FixedPoints {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        c_im: f64,
    },
    /// Green's function and Böttcher coordinate at a point, plus sampled identity checks.
    Green {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        c_im: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 3.0)]
        z: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        z_im: f64,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
        /// Random escaping points checked for G∘f = 2G and |φ| = e^G.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Cantor set traces, the orbits p, p⁺, p⁻ and χ_crit.
    Cantor {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
    },
    /// Critical itinerary and membership checks.
    Itinerary {
        #[command(flatten)]
        param: Param,
        #[arg(long, default_value_t = 6)]
        k_max: usize,
    },
    /// Parameter whose critical itinerary starts with the given symbols.
    FindParameter {
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Target symbols over {0, 1}.
        #[arg(long, default_value = "000000")]
        prefix: String,
    },
    /// Deformed family on one parameter or on the default grid.
    Deform {
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        /// Also run the quadratic-like check on the disk of this radius.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// First return or first landing branches.
    Branches {
        #[command(flatten)]
        param: Param,
        #[arg(long, default_value_t = 20)]
        time_cap: usize,
        #[arg(long, default_value = "return")]
        kind: String,
        /// Include every branch in the report.
        #[arg(long)]
        list: bool,
    },
    /// Peierls margin over first landing branches.
    Peierls {
        #[command(flatten)]
        param: Param,
        #[arg(long, default_value_t = 18)]
        time_cap: usize,
        #[arg(long)]
        upsilon: Option<f64>,
    },
    /// Bowen pressure brackets at the given t values.
    Pressure {
        #[command(flatten)]
        param: Param,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
        t: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        time_cap: usize,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        /// Also report the preimage-tree pressure to this depth.
        #[arg(long)]
        preimage_depth: Option<usize>,
    },
    /// Postcritical series and its bracket against the two-variable weights.
    Postcritical {
        #[command(flatten)]
        param: Param,
        #[arg(long)]
        t: f64,
        /// Evaluate the series at this p.
        #[arg(long, allow_hyphen_values = true)]
        p: Option<f64>,
        /// Bracket each term at p = −tχ/2 + delta.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 9)]
        k_max: usize,
    },
    /// Gibbs masses near the orbits of p⁺ and p⁻.
    Gibbs {
        #[command(flatten)]
        param: Param,
        #[arg(long, value_delimiter = ',', default_value = "2,8")]
        t: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        radius: f64,
        #[arg(long, default_value_t = 20)]
        time_cap: usize,
        #[arg(long)]
        weights: bool,
    },
    /// Machine check of the block series inequalities on a τ and s grid.
    SeriesVerify {
        #[arg(long, default_value_t = 1.0)]
        xi: f64,
        /// Growth q; 50(Ξ+1) when absent.
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, value_delimiter = ',', default_value = "2,5,10,20,50")]
        tau_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "49,49.5,50")]
        s_grid: Vec<f64>,
    },
    /// Brute-force series against the closed-form block sums.
    SeriesOracle {
        #[arg(long, default_value_t = 0.4)]
        xi: f64,
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1000)]
        k_max: u64,
    },
    /// Hat sequence windows, schedules from temperatures, predictions and pressure bands.
    Schedule {
        /// Sign prefix such as "+-+-"; defaults to the schedule's own signs.
        #[arg(long)]
        signs: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        xi: f64,
        #[arg(long, value_delimiter = ',')]
        betas: Vec<f64>,
        #[arg(long, default_value_t = 4.0)]
        a_sup: f64,
        #[arg(long, default_value_t = 2.0)]
        a_inf: f64,
        /// Multiplier ratio for predictions; 2^{4/A_sup} when absent.
        #[arg(long)]
        theta: Option<f64>,
        /// First index of the hat window (a decimal integer).
        #[arg(long, default_value = "0")]
        start: String,
        #[arg(long, default_value_t = 64)]
        len: usize,
        /// Temperatures for pressure bands (needs --chi).
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
        #[arg(long)]
        chi: Option<f64>,
    },
    /// Writes a P6 pixmap to --output and prints a summary.
    Render {
        #[arg(long, value_enum, default_value_t = Scene::Julia)]
        scene: Scene,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        c_im: f64,
        #[arg(long, default_value_t = 400)]
        width: usize,
        #[arg(long, default_value_t = 400)]
        height: usize,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        center: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        center_im: f64,
        #[arg(long, default_value_t = 4.4)]
        span: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long, value_delimiter = ',', default_value = "1/3,2/3")]
        angles: Vec<String>,
        /// Equipotential drawn in the puzzle scene.
        #[arg(long, default_value_t = 0.5)]
        level: f64,
    },
}

type CliResult<T> = Result<T, String>;

fn core<T>(r: gibbs_core::Result<T>) -> CliResult<T> {
    r.map_err(|e| e.to_string())
}

fn to_value<T: Serialize>(x: &T) -> CliResult<Value> {
    serde_json::to_value(x).map_err(|e| e.to_string())
}

/// What a command hands back: the report, CSV records and whether its checks held.
struct Outcome {
    result: Value,
    records: Vec<Value>,
    pass: bool,
}

impl Outcome {
    fn single(result: Value) -> Self {
        Outcome { records: vec![result.clone()], result, pass: true }
    }

    fn rows(records: Vec<Value>, pass: bool) -> Self {
        Outcome { result: Value::Array(records.clone()), records, pass }
    }

    fn checked(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }
}

fn parse_angle(s: &str) -> CliResult<Angle> {
    let (a, b) = s.split_once('/').ok_or_else(|| format!("angle '{s}' is not p/q"))?;
    let num = a.trim().parse::<i64>().map_err(|e| format!("angle '{s}': {e}"))?;
    let den = b.trim().parse::<u64>().map_err(|e| format!("angle '{s}': {e}"))?;
    core(Angle::new(num, den))
}

fn parse_bits(s: &str) -> CliResult<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(format!("prefix symbol '{c}' is not 0 or 1")),
        })
        .collect()
}

fn resolve(param: &Param) -> CliResult<f64> {
    if param.c == "found" {
        return core(find_parameter(param.n, &[0; 6], 6));
    }
    param.c.parse::<f64>().map_err(|e| format!("--c '{}': {e}", param.c))
}

fn margins(common: &Common) -> CliResult<Margins> {
    let m = Margins { d1: common.d1, d2: common.d2, d3: common.d3 };
    core(m.validate())?;
    Ok(m)
}

fn inventory(c: f64, n: usize, time_cap: usize, landing: bool, m: &Margins) -> CliResult<BranchInventory> {
    let map = QuadraticMap::real(c);
    core(if landing {
        enumerate_landing_branches_with(&map, n, time_cap, m)
    } else {
        enumerate_return_branches_with(&map, n, time_cap, m)
    })
}

fn inventory_summary(inv: &BranchInventory) -> CliResult<Value> {
    let top = inv.branches.iter().map(|b| b.return_time).max().unwrap_or(0);
    let counts: Vec<Value> = (0..=top)
        .filter(|&m| inv.count_at(m) > 0)
        .map(|m| json!({"m": m, "count": inv.count_at(m)}))
        .collect();
    let mut levels = Vec::new();
    for b in &inv.branches {
        if !levels.iter().any(|(l, m)| *l == b.level && *m == b.return_time) {
            levels.push((b.level, b.return_time));
        }
    }
    let min_per_level: Vec<Value> = {
        let top_level = levels.iter().map(|(l, _)| *l).max().unwrap_or(0);
        (0..=top_level)
            .filter_map(|k| levels.iter().filter(|(l, _)| *l == k).map(|(_, m)| *m).min().map(|m| json!({"level": k, "min_m": m})))
            .collect()
    };
    let decay = diameter_decay(inv).ok();
    Ok(json!({
        "kind": to_value(&inv.kind)?,
        "c": inv.c,
        "n": inv.n,
        "V_trace": to_value(&inv.v_trace)?,
        "time_cap": inv.time_cap,
        "complete_up_to": inv.complete_up_to,
        "distortion_margin": inv.distortion_margin,
        "branch_count": inv.branches.len(),
        "ambiguous": inv.branches.iter().filter(|b| b.ambiguous).count(),
        "min_return_time": inv.min_return_time(),
        "counts": counts,
        "levels": min_per_level,
        "decay": to_value(&decay)?,
    }))
}

fn run(cmd: &Command, common: &Common) -> CliResult<Outcome> {
    let prec = common.precision;
    let m = margins(common)?;
    Ok(match cmd {
        Command::Ray { c, c_im, angle, v_min, max_steps } => {
            let map = QuadraticMap::standard(Complex64::new(*c, *c_im));
            let ray = core(trace_external_ray(&map, parse_angle(angle)?, *v_min, *max_steps))?;
            let pass = ray.diagnostic.is_none();
            Outcome::single(to_value(&ray)?).checked(pass)
        }
        Command::FixedPoints { c, c_im } => {
            let map = QuadraticMap::standard(Complex64::new(*c, *c_im));
            Outcome::single(to_value(&core(fixed_points(&map))?)?)
        }
        Command::Green { c, c_im, z, z_im, tolerance, samples } => {
            let cc = Complex64::new(*c, *c_im);
            let map = QuadraticMap::standard(cc);
            let z = Complex64::new(*z, *z_im);
            let g = core(green_potential(&map, z, *tolerance))?;
            let phi = boettcher(&map, z).ok();
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let (mut worst_g, mut worst_phi, mut used) = (0.0f64, 0.0f64, 0);
            let g0 = core(green_potential(&map, Complex64::new(0.0, 0.0), *tolerance))?.value;
            while used < *samples {
                let r = rng.gen_range(1.0..4.0) * (cc.norm() + 2.0).sqrt();
                let w = Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU));
                let gw = core(green_potential(&map, w, *tolerance))?.value;
                if gw <= g0 + 1e-6 {
                    continue;
                }
                let gf = core(green_potential(&map, map.eval(w), *tolerance))?.value;
                worst_g = worst_g.max((gf - 2.0 * gw).abs());
                if let Ok(p) = boettcher(&map, w) {
                    worst_phi = worst_phi.max((p.norm() - gw.exp()).abs() / gw.exp());
                }
                used += 1;
            }
            let orbit = core(iterate_orbit(&map, z, 64, gibbs_core::dynamics::escape_radius(cc)))?;
            let pass = worst_g <= 1e-9 && worst_phi <= 1e-9;
            Outcome::single(json!({
                "green": to_value(&g)?,
                "boettcher": to_value(&phi)?,
                "escaped_at": orbit.escaped_at,
                "samples": samples,
                "max_functional_residual": worst_g,
                "max_modulus_residual": worst_phi,
                "sample_tolerance": 1e-9,
            }))
            .checked(pass)
        }
        Command::Cantor { c } => Outcome::single(to_value(&core(cantor_data(*c, m.d2))?)?),
        Command::Itinerary { param, k_max } => {
            let c = resolve(param)?;
            let it = core(critical_itinerary(c, param.n, *k_max))?;
            let kn = kn_membership(c, param.n, *k_max);
            let pass = kn.pass;
            Outcome::single(json!({"c": c, "itinerary": to_value(&it)?, "membership": to_value(&kn)?})).checked(pass)
        }
        Command::FindParameter { n, prefix } => {
            let bits = parse_bits(prefix)?;
            let c = core(find_parameter(*n, &bits, bits.len()))?;
            let kn = kn_membership(c, *n, bits.len());
            let pass = kn.pass;
            Outcome::single(json!({"c": c, "n": n, "prefix": prefix, "membership": to_value(&kn)?})).checked(pass)
        }
        Command::Deform { lambda, radius } => {
            let grid = match lambda {
                Some(l) => vec![*l],
                None => gibbs_core::deform::default_grid(),
            };
            let mut rows = Vec::new();
            let mut pass = true;
            for l in grid {
                let d = core(deformation(l))?;
                let r = core(verify_interpolation_identities(&d.map))?;
                let ok = r.max_residual() <= 1e-8 && r.equality_residual <= 1e-8;
                let mut row = json!({
                    "lambda": l,
                    "omega": d.omega,
                    "dp_at_p_minus": d.dp_at_p_minus,
                    "max_residual": r.max_residual(),
                    "multiplier_identity_residual": r.multiplier_identity_residual,
                    "equality_residual": r.equality_residual,
                    "lyapunov_gap": r.lyapunov_gap,
                    "residual_tolerance": 1e-8,
                    "pass": ok,
                });
                if let Some(rad) = radius {
                    let q = core(quadratic_like_check(&d.map, *rad))?;
                    row["quadratic_like"] = to_value(&q)?;
                }
                pass &= ok;
                rows.push(row);
            }
            Outcome::rows(rows, pass)
        }
        Command::Branches { param, time_cap, kind, list } => {
            let c = resolve(param)?;
            let landing = match kind.as_str() {
                "return" => false,
                "landing" => true,
                other => return Err(format!("--kind '{other}' is neither return nor landing")),
            };
            let inv = inventory(c, param.n, *time_cap, landing, &m)?;
            let mut summary = inventory_summary(&inv)?;
            if *list {
                summary["branches"] = to_value(&inv.branches)?;
            }
            Outcome::single(summary)
        }
        Command::Peierls { param, time_cap, upsilon } => {
            let c = resolve(param)?;
            let inv = inventory(c, param.n, *time_cap, true, &m)?;
            let data = core(cantor_data(c, m.d2))?;
            let ups = upsilon.unwrap_or_else(default_upsilon);
            let margin = core(peierls_margin(&inv, data.chi_crit(), ups))?;
            Outcome::single(json!({
                "c": c,
                "n": param.n,
                "time_cap": time_cap,
                "complete_up_to": inv.complete_up_to,
                "branches": inv.branches.len(),
                "chi_crit": data.chi_crit(),
                "upsilon": ups,
                "log_margin": margin,
            }))
            .checked(margin.is_finite())
        }
        Command::Pressure { param, t, time_cap, tolerance, preimage_depth } => {
            let c = resolve(param)?;
            let inv = inventory(c, param.n, *time_cap, false, &m)?;
            let map = QuadraticMap::real(c);
            let mut rows = Vec::new();
            for &t in t {
                let b = core(bowen_pressure(&inv, t, *tolerance))?;
                let mut row = to_value(&b)?;
                row["c"] = json!(c);
                row["n"] = json!(param.n);
                if let Some(j) = preimage_depth {
                    row["preimage_pressure"] = json!(core(preimage_pressure(&map, t, *j))?);
                    row["preimage_depth"] = json!(j);
                }
                rows.push(row);
            }
            Outcome::rows(rows, true)
        }
        Command::Postcritical { param, t, p, delta, k_max } => {
            let c = resolve(param)?;
            let map = QuadraticMap::real(c);
            if p.is_none() && delta.is_none() {
                return Err("postcritical needs --p or --delta".into());
            }
            let mut out = json!({"c": c, "n": param.n, "t": t, "k_max": k_max});
            let mut pass = true;
            if let Some(p) = p {
                out["series"] = to_value(&core(postcritical_series(&map, param.n, *t, *p, *k_max))?)?;
                out["p"] = json!(p);
            }
            if let Some(d) = delta {
                let terms = core(postcritical_bracket(&map, param.n, *t, *d, *k_max, &m))?;
                pass = terms.iter().all(|x| x.holds);
                out["delta"] = json!(d);
                out["bracket"] = to_value(&terms)?;
            }
            Outcome::single(out).checked(pass)
        }
        Command::Gibbs { param, t, radius, time_cap, weights } => {
            let c = resolve(param)?;
            let inv = inventory(c, param.n, *time_cap, false, &m)?;
            let map = QuadraticMap::real(c);
            let mut rows = Vec::new();
            for &t in t {
                let b = core(bowen_pressure(&inv, t, 1e-10))?;
                let p = 0.5 * (b.p_low + b.p_high);
                let r = core(gibbs_mass_report(&inv, &map, t, p, *radius))?;
                let mut row = to_value(&r)?;
                if !*weights {
                    row.as_object_mut().expect("object").remove("weights");
                }
                row["c"] = json!(c);
                rows.push(row);
            }
            Outcome::rows(rows, true)
        }
        Command::SeriesVerify { xi, q, tau_grid, s_grid } => {
            let scheme = core(match q {
                Some(q) => PartitionScheme::with_growth(*xi, *q),
                None => PartitionScheme::standard(*xi),
            })?;
            let r = core(verify_appendix_lemmas(&scheme, tau_grid, s_grid, prec))?;
            let pass = r.all_pass;
            let records = r.checks.iter().map(to_value).collect::<CliResult<Vec<_>>>()?;
            Outcome { result: to_value(&r)?, records, pass }
        }
        Command::SeriesOracle { xi, q, tau, lambda, k_max } => {
            let scheme = core(PartitionScheme::oracle(*xi, *q))?;
            let o = core(brute_force_oracle(&scheme, *tau, *lambda, *k_max, prec))?;
            Outcome::single(json!({"scheme": to_value(&scheme)?, "tau": tau, "lambda": lambda, "k_max": k_max, "sum": to_value(&o)?}))
        }
        Command::Schedule { signs, xi, betas, a_sup, a_inf, theta, start, len, t, chi } => {
            let scheme = core(hat_scheme(*xi))?;
            let mut out = json!({"scheme": to_value(&scheme)?});
            let mut pass = true;
            let mut sign_list: Option<Vec<Sign>> = match signs {
                Some(s) => Some(core(parse_signs(s))?),
                None => None,
            };
            let theta = match theta {
                Some(th) => *th,
                None => 2f64.powf(4.0 / a_sup),
            };
            if !betas.is_empty() {
                let r = core(schedule_from_temperatures(betas, *a_sup, *a_inf))?;
                pass &= r.holds();
                let own = sign_list.get_or_insert_with(|| r.signs.clone()).clone();
                let mut preds = Vec::new();
                for &b in betas {
                    match dominant_block_prediction(b, theta, &scheme, &own, prec) {
                        Ok(p) => preds.push(json!({"t": b, "tau": p.tau, "m0": p.m0, "sign": p.sign, "certified": p.certified})),
                        Err(e) => {
                            pass = false;
                            preds.push(json!({"t": b, "error": e.to_string()}));
                        }
                    }
                }
                let signs_seen: Vec<Option<&str>> = preds.iter().map(|p| p["sign"].as_str()).collect();
                let alternates = signs_seen.windows(2).all(|w| w[0].is_some() && w[1].is_some() && w[0] != w[1]);
                pass &= alternates;
                let mut rep = to_value(&r)?;
                rep["signs"] = json!(signs_to_string(&r.signs));
                out["schedule"] = rep;
                out["theta"] = json!(theta);
                out["A"] = json!(core(block_temperature(theta))?);
                out["predictions"] = json!(preds);
                out["predictions_alternate"] = json!(alternates);
            }
            if let Some(signs) = &sign_list {
                let start: Integer = start.parse().map_err(|e| format!("--start '{start}': {e}"))?;
                let j_max = Integer::from(&start + *len as u64);
                let hat = core(build_hat_sequence(signs, &scheme, &j_max))?;
                let syms = core(hat.window(&start, *len))?;
                let bin = core(project_itinerary(&hat, &start, *len))?;
                let check = core(hat.check_window(&start, *len))?;
                pass &= check.holds() && gibbs_core::schedule::check_compatibility(&bin, &syms);
                out["window"] = json!({
                    "start": start.to_string(),
                    "len": len,
                    "symbols": syms.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" "),
                    "binary": bin.iter().map(|b| char::from(b'0' + b)).collect::<String>(),
                    "check": to_value(&check)?,
                });
            }
            if !t.is_empty() {
                let chi = chi.ok_or("pressure bands need --chi")?;
                let bands = t
                    .iter()
                    .map(|&t| core(pressure_band(t, chi, theta, &scheme, prec)).and_then(|b| to_value(&b)))
                    .collect::<CliResult<Vec<_>>>()?;
                out["bands"] = json!(bands);
            }
            Outcome::single(out).checked(pass)
        }
        Command::Render { scene, c, c_im, width, height, center, center_im, span, max_iter, angles, level } => {
            let path = common.output.as_ref().ok_or("render needs --output")?;
            if *width == 0 || *height == 0 || !(*span > 0.0) {
                return Err("width, height and span must be positive".into());
            }
            let angles = angles.iter().map(|a| parse_angle(a)).collect::<CliResult<Vec<_>>>()?;
            let view = View { width: *width, height: *height, center: (*center, *center_im), span: *span, max_iter: *max_iter };
            let (canvas, summary) = core(render::render(*scene, Complex64::new(*c, *c_im), view, &angles, *level))?;
            std::fs::write(path, canvas.to_ppm()).map_err(|e| format!("{}: {e}", path.display()))?;
            Outcome::single(to_value(&summary)?)
        }
    })
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Ray { .. } => "ray",
        Command::FixedPoints { .. } => "fixed-points",
        Command::Green { .. } => "green",
        Command::Cantor { .. } => "cantor",
        Command::Itinerary { .. } => "itinerary",
        Command::FindParameter { .. } => "find-parameter",
        Command::Deform { .. } => "deform",
        Command::Branches { .. } => "branches",
        Command::Peierls { .. } => "peierls",
        Command::Pressure { .. } => "pressure",
        Command::Postcritical { .. } => "postcritical",
        Command::Gibbs { .. } => "gibbs",
        Command::SeriesVerify { .. } => "series-verify",
        Command::SeriesOracle { .. } => "series-oracle",
        Command::Schedule { .. } => "schedule",
        Command::Render { .. } => "render",
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> CliResult<()> {
    let c = &cli.common;
    let config = json!({
        "precision_bits": c.precision,
        "margins": {"d1": c.d1, "d2": c.d2, "d3": c.d3},
        "seed": c.seed,
        "upsilon_default": default_upsilon(),
    });
    let report = json!({
        "command": command_name(&cli.command),
        "config": config,
        "pass": outcome.pass,
        "result": outcome.result,
    });
    // render writes its pixmap to --output, so its summary goes to stdout
    let target = match cli.command {
        Command::Render { .. } => None,
        _ => c.output.as_ref(),
    };
    let sink: Box<dyn Write> = match target {
        Some(p) => Box::new(File::create(p).map_err(|e| format!("{}: {e}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match c.format {
        Format::Json => output::write_json(&report, &mut sink).map_err(|e| e.to_string())?,
        Format::Csv => {
            let mut records = outcome.records.clone();
            for r in &mut records {
                if let Value::Object(o) = r {
                    o.insert("pass".into(), json!(outcome.pass));
                }
            }
            output::write_csv(&config, &records, &mut sink).map_err(|e| e.to_string())?
        }
    }
    sink.flush().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.common.precision < 64 {
        eprintln!("error: precision {} below 64 bits", cli.common.precision);
        return ExitCode::from(1);
    }
    match run(&cli.command, &cli.common).and_then(|o| emit(&cli, &o).map(|_| o.pass)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
