//! Stock figure datasets: for each figure, the exact curve plus every
//! bound/envelope series needed to re-plot it, bundled with a JSON
//! manifest describing each emitted file.

use std::path::Path;

use survbound::cutoff_bounds::{amplitude_curve, build_cutoff_spec};
use survbound::envelope::sweep_envelope;
use survbound::grid::{cutoff_grid, time_grid};
use survbound::moments::e_from_h;
use survbound::oracle::exact_survival_grid;
use survbound::series_bounds::{
    abs_series_curve, cos2_curve, p_series_curve, ri_curve, BoundCurve, CutoffMode, Direction,
    Target,
};
use survbound::{EnergyDistribution, Error, QuadSettings, Result};

use crate::output;

/// One figure dataset: file names with rendered contents, manifest last.
pub struct FigureBundle {
    pub name: String,
    pub files: Vec<(String, String)>,
}

#[derive(serde::Serialize)]
struct ManifestEntry {
    file: String,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    direction: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cutoff: Option<f64>,
}

struct Builder {
    files: Vec<(String, String)>,
    manifest: Vec<ManifestEntry>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            files: Vec::new(),
            manifest: Vec::new(),
        }
    }

    fn exact(&mut self, dist: &EnergyDistribution, t_max: f64) -> Result<()> {
        let samples = exact_survival_grid(dist, &time_grid(t_max, 512))?;
        self.files
            .push(("exact.csv".into(), output::exact_csv(&samples)));
        self.manifest.push(ManifestEntry {
            file: "exact.csv".into(),
            kind: "exact",
            order: None,
            direction: None,
            target: None,
            cutoff: None,
        });
        Ok(())
    }

    fn curve(&mut self, file: String, kind: &'static str, curve: &BoundCurve) {
        let cutoff = match curve.cutoff_mode {
            CutoffMode::Fixed(c) => Some(c),
            _ => None,
        };
        self.files.push((
            file.clone(),
            output::bound_curves_csv(std::slice::from_ref(curve)),
        ));
        self.manifest.push(ManifestEntry {
            file,
            kind,
            order: Some(curve.order),
            direction: Some(curve.direction.as_str()),
            target: Some(curve.target.as_str()),
            cutoff,
        });
    }

    fn envelope(
        &mut self,
        dist: &EnergyDistribution,
        n: usize,
        c_points: usize,
        s: &QuadSettings,
    ) -> Result<()> {
        let grid = cutoff_grid(dist, c_points)?;
        let env = sweep_envelope(dist, n, &grid, s)?;
        let file = format!("envelope_n{n}.csv");
        self.files
            .push((file.clone(), output::envelopes_csv(std::slice::from_ref(&env))));
        self.manifest.push(ManifestEntry {
            file,
            kind: "envelope",
            order: Some(n),
            direction: Some(env.direction.as_str()),
            target: Some("absA"),
            cutoff: None,
        });
        if let Some(tail) = &env.tail {
            self.curve(format!("tail_n{n}.csv"), "tail", tail);
        }
        Ok(())
    }

    fn finish(mut self, name: &str) -> FigureBundle {
        let manifest = serde_json::json!({
            "figure": name,
            "files": self.manifest,
        });
        self.files
            .push(("manifest.json".into(), output::to_json(&manifest)));
        FigureBundle {
            name: name.into(),
            files: self.files,
        }
    }
}

pub fn build_figure(name: &str, s: &QuadSettings) -> Result<FigureBundle> {
    match name {
        "fig1" => fig1(s),
        "fig2" => fig2(s),
        "fig3" => fig3(s),
        "fig4" => fig4(s),
        "fig5" => fig5(s),
        "fig6" => fig6(s),
        "fig7" => fig7(s),
        other => Err(Error::InvalidInput(format!("unknown figure `{other}`"))),
    }
}

/// Survival-probability series bounds, ρ ∝ E^(−1/2)e^(−E), orders 2..8.
fn fig1(_s: &QuadSettings) -> Result<FigureBundle> {
    let dist = EnergyDistribution::gamma_half(1.0)?;
    let t_max = 3.0;
    let mut b = Builder::new();
    b.exact(&dist, t_max)?;
    let grid = time_grid(t_max, 512);
    for n in [2usize, 4, 6, 8] {
        let h = dist.raw_moments(n)?;
        let e = e_from_h(&h, n)?;
        b.curve(
            format!("bound_n{n}.csv"),
            "series",
            &p_series_curve(&e, n, &grid)?,
        );
    }
    Ok(b.finish("fig1"))
}

/// Heavy-tail density: the only existing series bound (n = 2) and the
/// cos²(ΔE·t) bound.
fn fig2(_s: &QuadSettings) -> Result<FigureBundle> {
    let dist = EnergyDistribution::power_law(1.0, 3.5)?;
    let t_max = 2.0;
    let mut b = Builder::new();
    b.exact(&dist, t_max)?;
    let grid = time_grid(t_max, 512);
    let h = dist.raw_moments(2)?;
    let e = e_from_h(&h, 2)?;
    b.curve(
        "bound_n2.csv".into(),
        "series",
        &p_series_curve(&e, 2, &grid)?,
    );
    b.curve(
        "cos2.csv".into(),
        "cos2",
        &cos2_curve(e.delta_e()?, &grid),
    );
    Ok(b.finish("fig2"))
}

/// Fixed-cut-off family: quadratic lower / quartic upper bounds at the
/// documented default cut-offs {0.5, 1, 2, 5}γ plus the no-cut-off curve.
fn fig3(s: &QuadSettings) -> Result<FigureBundle> {
    let dist = EnergyDistribution::power_law(1.0, 3.5)?;
    let t_max = 10.0;
    let mut b = Builder::new();
    b.exact(&dist, t_max)?;
    let grid = time_grid(t_max, 512);
    for (i, &c) in [0.5f64, 1.0, 2.0, 5.0].iter().enumerate() {
        let lower = build_cutoff_spec(&dist, c, 2, s)?;
        b.curve(
            format!("cutoff_lower_n2_c{i}.csv"),
            "cutoff",
            &amplitude_curve(&lower, &grid)?,
        );
        let upper = build_cutoff_spec(&dist, c, 4, s)?;
        b.curve(
            format!("cutoff_upper_n4_c{i}.csv"),
            "cutoff",
            &amplitude_curve(&upper, &grid)?,
        );
    }
    // c = ∞: the bare quadratic series bound on |A|
    let h = dist.raw_moments(2)?;
    let e = e_from_h(&h, 2)?;
    b.curve(
        "cutoff_lower_n2_cinf.csv".into(),
        "series",
        &abs_series_curve(&e, 2, &grid)?,
    );
    Ok(b.finish("fig3"))
}

/// Envelopes of the cut-off bounds for the heavy-tail density.
fn fig4(s: &QuadSettings) -> Result<FigureBundle> {
    let dist = EnergyDistribution::power_law(1.0, 3.5)?;
    let mut b = Builder::new();
    b.exact(&dist, 10.0)?;
    for n in [2usize, 4, 6, 8] {
        b.envelope(&dist, n, 256, s)?;
    }
    Ok(b.finish("fig4"))
}

/// Breit-Wigner envelopes around the exact exponential decay.
fn fig5(s: &QuadSettings) -> Result<FigureBundle> {
    let dist = EnergyDistribution::breit_wigner(1.0, 0.0)?;
    let mut b = Builder::new();
    b.exact(&dist, 5.0)?;
    for n in [2usize, 4, 6, 8] {
        b.envelope(&dist, n, 256, s)?;
    }
    Ok(b.finish("fig5"))
}

/// Bounds on the real part and (negative) imaginary part of A(t).
fn fig6(_s: &QuadSettings) -> Result<FigureBundle> {
    let dist = EnergyDistribution::gamma_half(1.0)?;
    let t_max = 4.0;
    let mut b = Builder::new();
    b.exact(&dist, t_max)?;
    let grid = time_grid(t_max, 512);
    let h = dist.raw_moments(4)?;
    for n in 1..=4usize {
        b.curve(format!("ri_n{n}.csv"), "ri", &ri_curve(&h, n, &grid)?);
    }
    Ok(b.finish("fig6"))
}

/// Square density: series bounds, their envelopes, and the n → ∞ upper
/// envelope 1 − 2π/(Mt).
fn fig7(s: &QuadSettings) -> Result<FigureBundle> {
    let dist = EnergyDistribution::square(1.0)?;
    let t_max = 20.0;
    let mut b = Builder::new();
    b.exact(&dist, t_max)?;
    let grid = time_grid(t_max, 512);
    for n in [2usize, 4, 6, 8] {
        let h = dist.raw_moments(n)?;
        let e = e_from_h(&h, n)?;
        b.curve(
            format!("bound_n{n}.csv"),
            "series",
            &abs_series_curve(&e, n, &grid)?,
        );
        b.envelope(&dist, n, 256, s)?;
    }
    // n → ∞ upper envelope, valid for t > 2π/M
    let two_pi = 2.0 * std::f64::consts::PI;
    let ninf = BoundCurve::from_raw_samples(
        0,
        Direction::Upper,
        Target::AbsA,
        CutoffMode::Envelope,
        grid.iter()
            .map(|&t| (t, if t > two_pi { 1.0 - two_pi / t } else { 1.0 }, t > two_pi)),
    );
    b.curve("envelope_ninf.csv".into(), "envelope_inf", &ninf);
    Ok(b.finish("fig7"))
}

/// Writes a bundle into `dir`, one file per entry.
pub fn write_bundle(dir: &Path, bundle: &FigureBundle) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, content) in &bundle.files {
        std::fs::write(dir.join(name), content)?;
    }
    Ok(())
}
