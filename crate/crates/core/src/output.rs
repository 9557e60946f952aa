//! CSV profiles and gnuplot scripts.
//!
//! A profile file is a few `#` metadata lines followed by `xi,T,gT` rows:
//! `xi` fixed with 12 decimals, `T` and `g(T)` rounded to 12 significant
//! digits and printed in shortest form.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::profile::{Profile, Sample};

pub const CSV_HEADER: &str = "xi,T,gT";
/// Metadata lines written before the header.
pub const CSV_META_LINES: usize = 5;

/// `v` rounded to 12 significant digits, shortest round-trip form.
pub fn format_sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let r: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    if r.abs() < 1e-5 || r.abs() >= 1e15 {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

pub fn format_profile_csv(profile: &Profile, width: Option<f64>) -> String {
    let m = &profile.meta;
    let mut out = String::new();
    let params: Vec<String> = m.model.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let _ = writeln!(out, "# model: {} {}", m.model.model, params.join(" "));
    let _ = writeln!(out, "# nu: {}", m.nu);
    let _ = writeln!(out, "# c: {}", m.c);
    let _ = writeln!(out, "# method: {}", m.method);
    match width {
        Some(d) => writeln!(out, "# width: {d}"),
        None => writeln!(out, "# width: unknown"),
    }
    .expect("writing to a string");
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in &profile.samples {
        let _ = writeln!(out, "{:.12},{},{}", s.xi, format_sig12(s.t), format_sig12(s.g));
    }
    out
}

pub fn write_profile_csv(profile: &Profile, width: Option<f64>, path: &Path) -> Result<()> {
    fs::write(path, format_profile_csv(profile, width))?;
    Ok(())
}

pub fn parse_profile_csv(text: &str) -> Result<Vec<Sample>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.starts_with('#'));
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        Some((i, _)) => return Err(Error::Csv { line: i + 1, reason: format!("expected header `{CSV_HEADER}`") }),
        None => return Err(Error::Csv { line: 0, reason: "empty file".into() }),
    }
    let mut samples = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Csv { line: i + 1, reason: format!("expected 3 columns, got {}", cols.len()) });
        }
        let num = |s: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| Error::Csv { line: i + 1, reason: format!("malformed number `{s}`") })
        };
        samples.push(Sample { xi: num(cols[0])?, t: num(cols[1])?, g: num(cols[2])? });
    }
    Ok(samples)
}

pub fn read_profile_csv(path: &Path) -> Result<Vec<Sample>> {
    parse_profile_csv(&fs::read_to_string(path)?)
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

/// A gnuplot script with two side-by-side panels, `T(ξ)` and `g(T(ξ))`,
/// one curve per profile labeled by `ν`. `csv_paths` are the files the
/// profiles were written to, as the script should reference them.
pub fn plot_script(profiles: &[(&Profile, &str)], image: &str) -> Result<String> {
    let Some(((first, _), rest)) = profiles.split_first() else {
        return Err(Error::Domain("plot script needs at least one profile".into()));
    };
    if let Some((other, _)) = rest.iter().find(|(p, _)| p.meta.model != first.meta.model) {
        return Err(Error::MixedModels(first.meta.model.model.clone(), other.meta.model.model.clone()));
    }
    let params: Vec<String> = first.meta.model.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let title = format!("{} ({})", first.meta.model.model, params.join(", "));
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script: stress and strain panels for {}", first.meta.model.model);
    let _ = writeln!(s, "set terminal pngcairo size 1200,480");
    let _ = writeln!(s, "set output {}", quote(image));
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set multiplot layout 1,2 title {}", quote(&title));
    let _ = writeln!(s, "set grid");
    let _ = writeln!(s, "set key top right");
    let _ = writeln!(s, "set xlabel 'xi'");
    for (column, label) in [(2, "T"), (3, "g(T)")] {
        let _ = writeln!(s, "set ylabel {}", quote(label));
        let curves: Vec<String> = profiles
            .iter()
            .map(|(p, path)| {
                format!(
                    "{} skip {} using 1:{column} with lines lw 2 title {}",
                    quote(path),
                    CSV_META_LINES + 1,
                    quote(&format!("nu = {}", p.meta.nu))
                )
            })
            .collect();
        let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
    }
    let _ = writeln!(s, "unset multiplot");
    Ok(s)
}

pub fn emit_plot_script(profiles: &[(&Profile, &str)], image: &str, path: &Path) -> Result<()> {
    fs::write(path, plot_script(profiles, image)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::ClosedFormSolution;
    use crate::constitutive::ConstitutiveModel;
    use crate::profile::{closed_form_profile, IntegratorConfig};
    use crate::wave::{reduced_field, SpeedSign, WaveProblem};

    fn logistic(nu: f64, samples: usize) -> Profile {
        let m = ConstitutiveModel::Quadratic { gp0: 1.0, gpp0: -0.6 };
        let f = reduced_field(&WaveProblem::normalized(m, nu, SpeedSign::Positive).unwrap()).unwrap();
        let sol = ClosedFormSolution::for_field(&f).unwrap();
        let cfg = IntegratorConfig { samples, ..IntegratorConfig::for_field(&f).unwrap() };
        closed_form_profile(&sol, &f, &cfg).unwrap()
    }

    #[test]
    fn sig12() {
        assert_eq!(format_sig12(0.5), "0.5");
        assert_eq!(format_sig12(0.425), "0.425");
        assert_eq!(format_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig12(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(format_sig12(1.234567890123456e-20), "1.23456789012e-20");
        assert_eq!(format_sig12(0.0), "0");
    }

    #[test]
    fn anchor_row_and_round_trip() {
        let p = logistic(0.5, 11);
        let text = format_profile_csv(&p, Some(5.5776));
        assert!(text.lines().any(|l| l == "0.000000000000,0.5,0.425"), "{text}");
        assert_eq!(text.lines().filter(|l| l.starts_with('#')).count(), CSV_META_LINES);
        assert!(text.ends_with('\n'));
        let parsed = parse_profile_csv(&text).unwrap();
        assert_eq!(parsed.len(), p.samples.len());
        let again = Profile { samples: parsed, meta: p.meta.clone() };
        assert_eq!(format_profile_csv(&again, Some(5.5776)), text);
    }

    #[test]
    fn malformed_csv() {
        assert!(parse_profile_csv("a,b\n").is_err());
        assert!(matches!(parse_profile_csv("xi,T,gT\n1,2\n"), Err(Error::Csv { line: 2, .. })));
        assert!(parse_profile_csv("xi,T,gT\n1,x,3\n").is_err());
    }

    #[test]
    fn plot_script_layout() {
        let ps: Vec<Profile> = [0.25, 0.5, 1.0].iter().map(|&nu| logistic(nu, 11)).collect();
        let names = ["a.csv", "b.csv", "c.csv"];
        let entries: Vec<(&Profile, &str)> = ps.iter().zip(names).collect();
        let s = plot_script(&entries, "fig.png").unwrap();
        assert!(s.contains("layout 1,2"));
        assert_eq!(s.matches("using 1:2").count(), 3);
        assert_eq!(s.matches("using 1:3").count(), 3);
        assert!(s.contains("'nu = 0.25'"));
        let single = plot_script(&entries[..1], "fig.png").unwrap();
        assert_eq!(single.matches("with lines").count(), 2);
    }

    #[test]
    fn plot_script_rejects_mixed_models() {
        let a = logistic(0.5, 11);
        let mut b = a.clone();
        b.meta.model.model = "cubic".into();
        assert!(matches!(plot_script(&[(&a, "a"), (&b, "b")], "x.png"), Err(Error::MixedModels(..))));
        assert!(plot_script(&[], "x.png").is_err());
    }
}
