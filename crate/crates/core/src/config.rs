//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::gas::GasLaw;
use crate::geometry::{Mesh, WallShape};
use crate::solver::{ProblemSetup, SolverConfig};
use crate::upstream::{Cutoff, UpstreamProfile};

const KEYS: &[&str] = &[
    "gas.gamma",
    "profile.kind",
    "profile.ubar",
    "profile.a",
    "profile.p",
    "profile.eps",
    "profile.k",
    "profile.csv_path",
    "wall.kind",
    "wall.height",
    "wall.csv_path",
    "domain.L",
    "domain.N",
    "domain.nx",
    "domain.ny",
    "solver.theta",
    "solver.picard_tol",
    "solver.lin_tol",
    "solver.max_iters",
    "solver.t0",
    "solver.t1",
    "solver.cap",
    "solver.eps_n",
    "solver.cutoff",
    "rho0",
    "rho0_factor",
    "scan.hi",
    "scan.lo",
    "scan.steps",
    "critical.tol",
    "output.dir",
];

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Constant { ubar: f64 },
    ConvexDecay { ubar: f64, a: f64, p: f64 },
    Perturbation { ubar: f64, eps: f64, k: f64 },
    Tabulated { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub enum WallSpec {
    Flat,
    SmoothBump { height: f64 },
    CornerBump { height: f64 },
    Tabulated { path: PathBuf },
}

/// Incoming density, either absolute or as a multiple of the subsonic floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rho0Spec {
    Absolute(f64),
    Factor(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub hi: f64,
    pub lo: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub gamma: f64,
    pub profile: ProfileSpec,
    pub wall: WallSpec,
    pub l: f64,
    pub n: f64,
    pub nx: usize,
    pub ny: usize,
    pub solver: SolverConfig,
    pub rho0: Option<Rho0Spec>,
    pub scan: Option<ScanSpec>,
    pub critical_tol: Option<f64>,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gamma: 2.0,
            profile: ProfileSpec::ConvexDecay { ubar: 1.0, a: 1.0, p: 1.0 },
            wall: WallSpec::SmoothBump { height: 0.25 },
            l: 8.0,
            n: 8.0,
            nx: 256,
            ny: 128,
            solver: SolverConfig::default(),
            rho0: Some(Rho0Spec::Factor(32.0)),
            scan: None,
            critical_tol: None,
            output_dir: None,
        }
    }
}

fn parse_entries(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`, got `{line}`", n + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(Error::Config(format!("line {}: unknown key `{key}`", n + 1)));
        }
        if value.is_empty() {
            return Err(Error::Config(format!("line {}: empty value for `{key}`", n + 1)));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{key}`", n + 1)));
        }
    }
    Ok(map)
}

struct Entries(BTreeMap<String, String>);

impl Entries {
    fn num(&self, key: &str) -> Result<Option<f64>> {
        self.0
            .get(key)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Config(format!("`{key}` must be a finite number, got `{v}`")))
            })
            .transpose()
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let x = self.num(key)?.unwrap_or(default);
        if x > 0.0 {
            Ok(x)
        } else {
            Err(Error::Config(format!("`{key}` must be positive, got {x}")))
        }
    }

    fn count(&self, key: &str, default: usize) -> Result<usize> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<usize>()
                .ok()
                .filter(|&x| x > 0)
                .ok_or_else(|| Error::Config(format!("`{key}` must be a positive integer, got `{v}`"))),
        }
    }

    fn text(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn path(&self, key: &str, base: &Path) -> Result<PathBuf> {
        let p = self.text(key).ok_or_else(|| Error::Config(format!("`{key}` is required")))?;
        Ok(base.join(p))
    }
}

impl RunConfig {
    /// Parses config text; relative CSV paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let e = Entries(parse_entries(text)?);
        let d = Self::default();
        let gamma = e.num("gas.gamma")?.unwrap_or(d.gamma);
        if !(gamma > 1.0) {
            return Err(Error::Config(format!("gas.gamma must exceed 1, got {gamma}")));
        }
        let ubar = e.positive("profile.ubar", 1.0)?;
        let profile = match e.text("profile.kind").unwrap_or("convex_decay") {
            "constant" => ProfileSpec::Constant { ubar },
            "convex_decay" => {
                ProfileSpec::ConvexDecay { ubar, a: e.positive("profile.a", 1.0)?, p: e.positive("profile.p", 1.0)? }
            }
            "perturbation" => ProfileSpec::Perturbation {
                ubar,
                eps: e.num("profile.eps")?.unwrap_or(0.1),
                k: e.positive("profile.k", 1.0)?,
            },
            "tabulated" => ProfileSpec::Tabulated { path: e.path("profile.csv_path", base)? },
            other => return Err(Error::Config(format!("unknown profile.kind `{other}`"))),
        };
        let height = e.positive("wall.height", 0.25)?;
        let wall = match e.text("wall.kind").unwrap_or("smooth_bump") {
            "flat" => WallSpec::Flat,
            "smooth_bump" => WallSpec::SmoothBump { height },
            "corner_bump" => WallSpec::CornerBump { height },
            "tabulated" => WallSpec::Tabulated { path: e.path("wall.csv_path", base)? },
            other => return Err(Error::Config(format!("unknown wall.kind `{other}`"))),
        };
        let l = e.positive("domain.L", d.l)?;
        let n = e.positive("domain.N", d.n)?;
        let nx = e.count("domain.nx", d.nx)?;
        let ny = e.count("domain.ny", d.ny)?;

        let base_solver = SolverConfig::default();
        let cutoff = match e.text("solver.cutoff").unwrap_or("on") {
            "off" => None,
            "on" => Some(match e.num("solver.eps_n")? {
                Some(eps) => Cutoff::from_eps(eps)?,
                None => {
                    let c = Cutoff::default();
                    Cutoff::new(
                        e.num("solver.t0")?.unwrap_or(c.t0()),
                        e.num("solver.t1")?.unwrap_or(c.t1()),
                        e.num("solver.cap")?.unwrap_or(c.cap()),
                    )?
                }
            }),
            other => return Err(Error::Config(format!("solver.cutoff must be `on` or `off`, got `{other}`"))),
        };
        let solver = SolverConfig {
            theta: e.positive("solver.theta", base_solver.theta)?,
            picard_tol: e.positive("solver.picard_tol", base_solver.picard_tol)?,
            lin_tol: e.positive("solver.lin_tol", base_solver.lin_tol)?,
            max_iters: e.count("solver.max_iters", base_solver.max_iters)?,
            cutoff,
        };
        solver.validate()?;

        let rho0 = match (e.num("rho0")?, e.num("rho0_factor")?) {
            (Some(_), Some(_)) => return Err(Error::Config("give either rho0 or rho0_factor, not both".into())),
            (Some(r), None) => Some(Rho0Spec::Absolute(r)),
            (None, Some(f)) => Some(Rho0Spec::Factor(f)),
            (None, None) => d.rho0,
        };
        if let Some(Rho0Spec::Absolute(x) | Rho0Spec::Factor(x)) = rho0 {
            if !(x > 0.0) {
                return Err(Error::Config(format!("rho0 must be positive, got {x}")));
            }
        }
        let scan = match (e.num("scan.hi")?, e.num("scan.lo")?) {
            (Some(hi), Some(lo)) => {
                if !(hi > lo && lo > 0.0) {
                    return Err(Error::Config(format!("scan needs hi > lo > 0, got ({hi}, {lo})")));
                }
                Some(ScanSpec { hi, lo, steps: e.count("scan.steps", 11)? })
            }
            (None, None) => None,
            _ => return Err(Error::Config("scan.hi and scan.lo must be given together".into())),
        };
        let critical_tol = e.num("critical.tol")?;
        if critical_tol.is_some_and(|t| !(t > 0.0)) {
            return Err(Error::Config("critical.tol must be positive".into()));
        }
        let output_dir = e.text("output.dir").map(|p| base.join(p));

        let cfg = Self { gamma, profile, wall, l, n, nx, ny, solver, rho0, scan, critical_tol, output_dir };
        if !matches!(cfg.wall, WallSpec::Tabulated { .. }) && !(cfg.l > cfg.wall_height_hint()) {
            return Err(Error::Config(format!("domain.L = {} must exceed the wall height", cfg.l)));
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn wall_height_hint(&self) -> f64 {
        match self.wall {
            WallSpec::Flat | WallSpec::Tabulated { .. } => 0.0,
            WallSpec::SmoothBump { height } | WallSpec::CornerBump { height } => height,
        }
    }

    pub fn gas(&self) -> Result<GasLaw> {
        GasLaw::new(self.gamma)
    }

    pub fn profile(&self) -> Result<UpstreamProfile> {
        match &self.profile {
            ProfileSpec::Constant { ubar } => UpstreamProfile::constant(*ubar),
            ProfileSpec::ConvexDecay { ubar, a, p } => UpstreamProfile::convex_decay(*ubar, *a, *p),
            ProfileSpec::Perturbation { ubar, eps, k } => UpstreamProfile::perturbation(*ubar, *eps, *k),
            ProfileSpec::Tabulated { path } => UpstreamProfile::from_csv(path),
        }
    }

    pub fn wall(&self) -> Result<WallShape> {
        match &self.wall {
            WallSpec::Flat => Ok(WallShape::flat()),
            WallSpec::SmoothBump { height } => WallShape::smooth_bump(*height),
            WallSpec::CornerBump { height } => WallShape::corner_bump(*height),
            WallSpec::Tabulated { path } => WallShape::from_csv(path),
        }
    }

    pub fn mesh(&self) -> Result<Mesh> {
        Mesh::build(&self.wall()?, self.l, self.n, self.nx, self.ny)
    }

    /// Subsonic floor of the configured gas and profile.
    pub fn rho_star(&self) -> Result<f64> {
        Ok(self.gas()?.rho_star(self.profile()?.max_speed()))
    }

    /// Absolute incoming density, if configured.
    pub fn rho0_value(&self) -> Result<Option<f64>> {
        Ok(match self.rho0 {
            None => None,
            Some(Rho0Spec::Absolute(r)) => Some(r),
            Some(Rho0Spec::Factor(f)) => Some(f * self.rho_star()?),
        })
    }

    /// Problem at `rho0`.
    pub fn setup_at(&self, rho0: f64) -> Result<ProblemSetup> {
        ProblemSetup::new(self.gas()?, &self.profile()?, rho0, self.mesh()?, self.solver.clone())
    }

    /// Problem at the configured density.
    pub fn setup(&self) -> Result<ProblemSetup> {
        let rho0 = self.rho0_value()?.ok_or_else(|| Error::Config("rho0 or rho0_factor is required".into()))?;
        self.setup_at(rho0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::parse(text, Path::new("."))
    }

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn reads_dotted_keys() {
        let c = parse(
            "# flat case\ngas.gamma = 1.4\nprofile.kind = constant\nprofile.ubar = 2\nwall.kind = flat\n\
             domain.nx = 64\ndomain.ny = 32\nrho0 = 40\nsolver.eps_n = 0.0625\nscan.hi = 100\nscan.lo = 50\n",
        )
        .unwrap();
        assert_eq!(c.gamma, 1.4);
        assert_eq!(c.profile, ProfileSpec::Constant { ubar: 2.0 });
        assert_eq!(c.wall, WallSpec::Flat);
        assert_eq!((c.nx, c.ny), (64, 32));
        assert_eq!(c.rho0, Some(Rho0Spec::Absolute(40.0)));
        assert_eq!(c.solver.cutoff.unwrap().t0(), 0.875);
        assert_eq!(c.scan, Some(ScanSpec { hi: 100.0, lo: 50.0, steps: 11 }));
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "gas.gama = 2",
            "gas.gamma 2",
            "gas.gamma = two",
            "gas.gamma = 0.9",
            "domain.nx = -3",
            "solver.t0 = 0.8\nsolver.t1 = 0.7",
            "wall.height = 9",
            "rho0 = 5\nrho0_factor = 2",
            "scan.hi = 3",
            "wall.kind = wavy",
            "rho0 = 1\nrho0 = 2",
        ] {
            assert!(matches!(parse(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn factor_scales_rho_star() {
        let c = parse("rho0_factor = 3").unwrap();
        assert!((c.rho0_value().unwrap().unwrap() - 6.0).abs() < 1e-12);
    }
}
