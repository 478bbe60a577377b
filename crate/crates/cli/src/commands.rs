use crate::args::{Check, Command, Common, FilterKind};
use num_complex::Complex64;
use spherewave::diagnostics::{
    addition_defect, autocorrelation_closed_form, autocorrelation_many, localization_profile, psi_grid,
    quadrature_exactness, steer_check, LocalizationOptions,
};
use spherewave::io::{read_coeffs, read_frame_coeffs, write_coeffs, write_frame_coeffs, write_frame_description};
use spherewave::signal::{random_rotation, random_signal};
use spherewave::wavelet::optimal_profile;
use spherewave::{build_frame, DirectionalProfile, Error, FilterProfile, Frame, Result, WaveletSpec};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::process::ExitCode;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Index(_) => 2,
        _ => 1,
    }
}

fn output(common: &Common) -> Result<Box<dyn Write>> {
    Ok(match &common.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn open(path: &std::path::Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

fn filter(c: &Common) -> Result<FilterProfile> {
    match c.filter {
        FilterKind::Bump => Ok(FilterProfile::SmoothBump),
        FilterKind::Spline => {
            if c.q == 0 {
                return Err(Error::Config("--q must be positive".into()));
            }
            Ok(FilterProfile::Spline { q: c.q })
        }
    }
}

fn profile(c: &Common, d: usize, k: usize) -> Result<DirectionalProfile> {
    let name = c.profile.clone().unwrap_or_else(|| if k == 0 { "zonal".into() } else { "optimal".into() });
    let p = match name.as_str() {
        "zonal" => DirectionalProfile::zonal(),
        "optimal" if d == 3 => DirectionalProfile::d3_convention(k),
        "optimal" => optimal_profile(d, k)?,
        other => match other.strip_prefix("custom:") {
            Some(path) => spherewave::io::read_profile(open(path.as_ref())?)?,
            None => return Err(Error::Config(format!("unknown profile `{other}`"))),
        },
    };
    if p.kind() == spherewave::wavelet::ProfileKind::Zonal && k != 0 {
        return Err(Error::Config("the zonal profile needs --K 0".into()));
    }
    if p.kind() != spherewave::wavelet::ProfileKind::Zonal && p.k() != k {
        return Err(Error::Config(format!("profile order {} does not match --K {k}", p.k())));
    }
    p.check_dimension(d)?;
    Ok(p)
}

struct Resolved {
    d: usize,
    k: usize,
}

fn resolve(c: &Common, default_d: usize) -> Result<Resolved> {
    let d = c.d.unwrap_or(default_d);
    if d < 3 {
        return Err(Error::Config(format!("--d must be at least 3, got {d}")));
    }
    Ok(Resolved { d, k: c.k.unwrap_or(0) })
}

fn frame(c: &Common) -> Result<Frame> {
    let r = resolve(c, 3)?;
    let j_max = c.j_max.unwrap_or(3);
    build_frame(r.d, r.k, j_max, filter(c)?, profile(c, r.d, r.k)?)
}

fn spec(c: &Common, default_d: usize, default_n: f64) -> Result<WaveletSpec> {
    let r = resolve(c, default_d)?;
    WaveletSpec::new(r.d, profile(c, r.d, r.k)?, filter(c)?, c.n.unwrap_or(default_n))
}

fn degree_arg(c: &Common, default: usize) -> Result<usize> {
    match c.n {
        None => Ok(default),
        Some(v) if v >= 0.0 && v.fract() == 0.0 => Ok(v as usize),
        Some(v) => Err(Error::Config(format!("--N must be a nonnegative integer here, got {v}"))),
    }
}

pub fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::BuildFrame { common } => {
            let f = frame(&common)?;
            let mut out = output(&common)?;
            write_frame_description(&f, &mut out)?;
            out.flush()?;
        }
        Command::Analyze { common, input } => {
            let f = frame(&common)?;
            let v = read_coeffs(open(&input)?)?;
            let c = f.analyze(&v)?;
            let mut out = output(&common)?;
            write_frame_coeffs(&f, &c, &mut out)?;
            out.flush()?;
        }
        Command::Synthesize { common, input, degree, project } => {
            let f = frame(&common)?;
            let c = read_frame_coeffs(open(&input)?, &f)?;
            let top = f.scales().last().map(|s| s.spec().max_degree()).unwrap_or(0);
            let deg = degree.unwrap_or(top);
            let v = if project { f.synthesize_projected(&c, deg)? } else { f.synthesize(&c, deg)? };
            let mut out = output(&common)?;
            write_coeffs(&v, &mut out)?;
            out.flush()?;
        }
        Command::Verify { check, common, count } => return verify(check, &common, count),
        Command::Localize { common, annuli, q_eff } => {
            let s = spec(&common, 3, 16.0)?;
            let opts = LocalizationOptions { q_eff, ..Default::default() };
            let r = localization_profile(&s, annuli, opts)?;
            let mut out = output(&common)?;
            writeln!(out, "# d {} K {} N {} q_eff {} peak {:.6e} peak/N^(d-1) {:.6e}", r.d, r.k, r.n, r.q_eff, r.peak, r.peak / r.n.powi(r.d as i32 - 1))?;
            writeln!(out, "lo,hi,sup,ratio")?;
            for a in &r.annuli {
                writeln!(out, "{:.6e},{:.6e},{:.6e},{:.6e}", a.lo, a.hi, a.sup, a.ratio)?;
            }
            out.flush()?;
        }
        Command::Autocorr { common, angles } => {
            let s = spec(&common, 4, 8.0)?;
            let grid: Vec<f64> = (0..angles).map(|i| std::f64::consts::PI * i as f64 / angles.max(1) as f64).collect();
            let q = autocorrelation_many(&s, &grid)?;
            let mut out = output(&common)?;
            writeln!(out, "angle,quadrature_re,quadrature_im,closed_form,abs_diff")?;
            let mut worst: f64 = 0.0;
            for (a, v) in grid.iter().zip(&q) {
                match autocorrelation_closed_form(&s, *a) {
                    Ok(c) => {
                        let diff = (v - Complex64::new(c, 0.0)).norm();
                        worst = worst.max(diff);
                        writeln!(out, "{a:.6e},{:.16e},{:.16e},{c:.16e},{diff:.3e}", v.re, v.im)?;
                    }
                    Err(_) => writeln!(out, "{a:.6e},{:.16e},{:.16e},,", v.re, v.im)?,
                }
            }
            out.flush()?;
            if let Some(tol) = common.tol {
                if worst > tol {
                    eprintln!("auto-correlation mismatch {worst:.3e} exceeds {tol:.1e}");
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Command::Steer { common, nodes, points } => {
            use rand::SeedableRng;
            let s = spec(&common, 3, 8.0)?;
            let d = s.d();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(common.seed);
            let h = if d == 3 {
                spherewave::sphere::plane_rotation(3, rand::Rng::gen_range(&mut rng, 0.0..std::f64::consts::TAU))
            } else {
                random_rotation(d - 1, &mut rng).embed()
            };
            let r = steer_check(&s, &h, nodes, points, common.seed)?;
            let mut out = output(&common)?;
            writeln!(out, "nodes {} max_error {:.6e}", r.nodes, r.max_error)?;
            out.flush()?;
            if let Some(tol) = common.tol {
                if r.max_error > tol {
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Command::PsiGrid { common, nt, nphi, pgm, raw } => {
            let s = spec(&common, 4, 16.0)?;
            let g = psi_grid(&s, nt, nphi, !raw)?;
            let mut out = output(&common)?;
            g.write_csv(&mut out)?;
            out.flush()?;
            if let Some(p) = pgm {
                let mut w = BufWriter::new(File::create(p)?);
                g.write_pgm(&mut w)?;
                w.flush()?;
            }
        }
        Command::RandomSignal { common } => {
            let r = resolve(&common, 3)?;
            let v = random_signal(r.d, degree_arg(&common, 4)?, common.seed)?;
            let mut out = output(&common)?;
            write_coeffs(&v, &mut out)?;
            out.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn report(out: &mut dyn Write, rows: &[(String, f64)], tol: f64) -> Result<ExitCode> {
    let mut ok = true;
    for (label, gap) in rows {
        let pass = *gap <= tol;
        ok &= pass;
        writeln!(out, "{label} gap {gap:.3e} {}", if pass { "ok" } else { "FAIL" })?;
    }
    writeln!(out, "max gap {:.3e} tolerance {tol:.1e}", rows.iter().map(|r| r.1).fold(0.0, f64::max))?;
    out.flush()?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn verify(check: Check, common: &Common, count: Option<usize>) -> Result<ExitCode> {
    let mut rows = Vec::new();
    let tol;
    match check {
        Check::Parseval => {
            tol = common.tol.unwrap_or(1e-10);
            let f = frame(common)?;
            let degree = 1usize << f.j_max().saturating_sub(1);
            for i in 0..count.unwrap_or(20) as u64 {
                let seed = common.seed.wrapping_add(i);
                let v = random_signal(f.d(), degree, seed)?;
                rows.push((format!("signal seed {seed} degree {degree}"), f.parseval_gap(&v)?));
            }
        }
        Check::QuadExactness => {
            tol = common.tol.unwrap_or(1e-10);
            let r = resolve(common, 3)?;
            let q = quadrature_exactness(r.d, degree_arg(common, 32)?)?;
            rows.push((format!("d {} degree {} integrals", q.d, q.degree), q.integral_defect));
            rows.push((format!("d {} degree {} gram", q.d, q.degree), q.gram_defect));
        }
        Check::Addition => {
            tol = common.tol.unwrap_or(1e-10);
            let r = resolve(common, 3)?;
            for n in 0..=degree_arg(common, 8)? {
                rows.push((format!("d {} n {n}", r.d), addition_defect(r.d, n, count.unwrap_or(100), common.seed)?));
            }
        }
        Check::Telescope => {
            use rand::{Rng, SeedableRng};
            tol = common.tol.unwrap_or(1e-9);
            let f = frame(common)?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(common.seed);
            for j in 0..f.j_max() {
                let atoms = f.scale(j + 1).map(|s| s.atom_count()).unwrap_or(0);
                let sig = random_signal(f.d(), (1usize << j) / 2, rng.gen())?;
                for trial in 0..count.unwrap_or(5) {
                    let omega: Vec<usize> = (0..atoms).filter(|_| rng.gen_bool(0.5)).collect();
                    let lam = f.lambda_operator(&sig, j, &omega)?;
                    let gap = lam.max_abs_diff(&sig.resized(lam.max_degree()));
                    rows.push((format!("J {j} Omega #{trial} ({} atoms) projector", omega.len()), gap));
                }
                let wide = random_signal(f.d(), 1usize << (j + 1), rng.gen())?;
                let all: Vec<usize> = (0..atoms).collect();
                let lam = f.lambda_operator(&wide, j, &all)?;
                let filt = f.filter();
                let next = wide
                    .resized(lam.max_degree())
                    .scale_by_degree(|n| filt.phi_unchecked(n as f64 / 2f64.powi(j as i32 + 1)).powi(2));
                rows.push((format!("J {j} full Omega telescoping"), lam.max_abs_diff(&next)));
            }
        }
    }
    let mut out = output(common)?;
    report(&mut out, &rows, tol)
}
