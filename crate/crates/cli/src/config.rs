//! Scenario files.
//!
//! A scenario is a TOML document; the accepted keys are listed in the
//! README. Parsing never stops at the first problem: every syntax, type,
//! unknown-key and precondition error is collected and reported together.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::fmt;

use qrad_core::cavity::{fundamental, BoxGeometry, BoxMode, VibrationProfile};
use qrad_core::dielectric::{PermittivityProfile, ThermalCoefficient};
use qrad_core::frw::{OccupationFrequency, ScaleFactorProfile};
use qrad_core::mirror::{Trajectory, WavenumberGrid};
use qrad_core::{units, Temperature};
use toml::{Table, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioKind {
    Mirror,
    Cavity,
    DielectricSmallR,
    DielectricLargeR,
    Frw,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        Self::Mirror,
        Self::Cavity,
        Self::DielectricSmallR,
        Self::DielectricLargeR,
        Self::Frw,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Mirror => "mirror",
            Self::Cavity => "cavity",
            Self::DielectricSmallR => "dielectric-smallR",
            Self::DielectricLargeR => "dielectric-largeR",
            Self::Frw => "frw",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Name of the section holding the physical parameters.
    pub fn section(self) -> &'static str {
        match self {
            Self::Mirror => "mirror",
            Self::Cavity => "cavity",
            Self::DielectricSmallR | Self::DielectricLargeR => "dielectric",
            Self::Frw => "frw",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

macro_rules! keyword_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
        pub enum $name {
            #[default]
            $($variant),+
        }

        impl $name {
            pub fn as_str(self) -> &'static str {
                match self {
                    $(Self::$variant => $text),+
                }
            }

            fn from_name(s: &str) -> Option<Self> {
                match s {
                    $($text => Some(Self::$variant),)+
                    _ => None,
                }
            }

            fn choices() -> String {
                [$($text),+].join(", ")
            }
        }
    };
}

keyword_enum!(TemperatureUnit { Natural => "natural", Kelvin => "K" });
keyword_enum!(LengthUnit { Natural => "natural", Metre => "m", Centimetre => "cm" });
keyword_enum!(FrequencyUnit { Natural => "natural", Gigahertz => "GHz" });
keyword_enum!(Spacing { Linear => "linear", Log => "log" });

/// How input quantities are converted to natural units. Lengths cover
/// durations too (c·t); bubble volumes scale with the cube of the length
/// unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Units {
    pub temperature: TemperatureUnit,
    pub length: LengthUnit,
    pub frequency: FrequencyUnit,
}

impl Units {
    pub fn temperature(&self, t: f64) -> f64 {
        match self.temperature {
            TemperatureUnit::Natural => t,
            TemperatureUnit::Kelvin => units::kelvin(t),
        }
    }

    pub fn length(&self, x: f64) -> f64 {
        match self.length {
            LengthUnit::Natural | LengthUnit::Metre => x,
            LengthUnit::Centimetre => units::length(x, units::LengthUnit::Centimetre),
        }
    }

    pub fn volume(&self, v: f64) -> f64 {
        let s = self.length(1.0);
        v * s * s * s
    }

    pub fn frequency(&self, w: f64) -> f64 {
        match self.frequency {
            FrequencyUnit::Natural => w,
            FrequencyUnit::Gigahertz => units::gigahertz(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MirrorFamily {
    Gaussian { a: f64, tau: f64 },
    WindowedSine { a: f64, omega: f64, tau: f64 },
    Tabulated { t0: f64, dt: f64, samples: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CavityDrive {
    /// Squeezing parameter `Ξ = ωεT_s/2`.
    Xi(f64),
    Duration(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CavityModel {
    pub lengths: [f64; 3],
    pub epsilon: f64,
    pub drive: CavityDrive,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Bubble {
    Gaussian { v0: f64, tau: f64 },
    Tabulated { t0: f64, dt: f64, volume: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallRModel {
    pub eps_inf: f64,
    pub theta0: f64,
    pub bubble: Bubble,
    pub coefficient: ThermalCoefficient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LargeRModel {
    pub eps_inf: f64,
    pub theta0: f64,
    /// Modulation `θ₀ sin(2Ωt)`; this is Ω.
    pub omega: f64,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FrwFamily {
    Tanh { omega_in: f64, omega_out: f64, tau_r: f64 },
    Bump { omega0: f64, height: f64, width: f64 },
    Constant { omega: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrwModel {
    pub profile: FrwFamily,
    pub occupation: OccupationFrequency,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Mirror(MirrorFamily),
    Cavity(CavityModel),
    SmallR(SmallRModel),
    LargeR(LargeRModel),
    Frw(FrwModel),
}

impl Model {
    pub fn kind(&self) -> ScenarioKind {
        match self {
            Model::Mirror(_) => ScenarioKind::Mirror,
            Model::Cavity(_) => ScenarioKind::Cavity,
            Model::SmallR(_) => ScenarioKind::DielectricSmallR,
            Model::LargeR(_) => ScenarioKind::DielectricLargeR,
            Model::Frw(_) => ScenarioKind::Frw,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    List(Vec<f64>),
    Range {
        min: f64,
        max: f64,
        points: usize,
        spacing: Spacing,
    },
}

impl Grid {
    /// Grid values in input units.
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::List(v) => v.clone(),
            Grid::Range {
                min,
                max,
                points,
                spacing,
            } => {
                if *points == 1 {
                    return vec![*min];
                }
                let last = (*points - 1) as f64;
                (0..*points)
                    .map(|i| {
                        let x = i as f64 / last;
                        match spacing {
                            Spacing::Linear => min + (max - min) * x,
                            Spacing::Log => min * (max / min).powf(x),
                        }
                    })
                    .collect()
            }
        }
    }
}

pub const DEFAULT_PANELS: usize = 50;
pub const DEFAULT_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Numerics {
    /// Logarithmic Gauss–Legendre panels of the mirror wavenumber grid.
    pub panels: usize,
    /// Nodes per panel.
    pub order: usize,
    /// Cells per edge for the cavity local-field maps; 0 skips them.
    pub local_grid: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            panels: DEFAULT_PANELS,
            order: DEFAULT_ORDER,
            local_grid: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub dir: String,
    pub prefix: String,
}

impl Default for Output {
    fn default() -> Self {
        Self {
            dir: "qrad-out".into(),
            prefix: "spectrum".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub model: Model,
    /// In the configured temperature unit; one run per entry.
    pub temperatures: Vec<f64>,
    pub units: Units,
    pub grid: Option<Grid>,
    pub numerics: Numerics,
    pub output: Output,
}

impl ScenarioConfig {
    pub fn kind(&self) -> ScenarioKind {
        self.model.kind()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Text { line: usize, column: usize },
    Key(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub location: Location,
    pub message: String,
}

impl ConfigError {
    fn at(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            location: Location::Key(key.into()),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            Location::Text { line, column } => {
                write!(f, "line {line}, column {column}: {}", self.message)
            }
            Location::Key(k) if k.is_empty() => f.write_str(&self.message),
            Location::Key(k) => write!(f, "{k}: {}", self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

type Sink = RefCell<Vec<ConfigError>>;

struct Reader<'a> {
    path: String,
    table: &'a Table,
    used: BTreeSet<&'a str>,
    sink: &'a Sink,
}

impl<'a> Reader<'a> {
    fn new(path: &str, table: &'a Table, sink: &'a Sink) -> Self {
        Self {
            path: path.to_string(),
            table,
            used: BTreeSet::new(),
            sink,
        }
    }

    fn key(&self, k: &str) -> String {
        if self.path.is_empty() {
            k.to_string()
        } else {
            format!("{}.{k}", self.path)
        }
    }

    fn error(&self, k: &str, msg: impl Into<String>) {
        self.sink.borrow_mut().push(ConfigError::at(self.key(k), msg));
    }

    fn has(&self, k: &str) -> bool {
        self.table.contains_key(k)
    }

    fn get(&mut self, k: &str) -> Option<&'a Value> {
        let (name, v) = self.table.get_key_value(k)?;
        self.used.insert(name.as_str());
        Some(v)
    }

    fn required(&mut self, k: &str) -> Option<&'a Value> {
        let v = self.get(k);
        if v.is_none() {
            self.error(k, "missing required key");
        }
        v
    }

    fn as_num(&self, k: &str, v: &Value) -> Option<f64> {
        let x = match v {
            Value::Float(x) => *x,
            Value::Integer(i) => *i as f64,
            other => {
                self.error(k, format!("expected a number, found {}", other.type_str()));
                return None;
            }
        };
        if !x.is_finite() {
            self.error(k, "must be finite");
            return None;
        }
        Some(x)
    }

    fn num(&mut self, k: &str) -> Option<f64> {
        let v = self.required(k)?;
        self.as_num(k, v)
    }

    fn uint_or(&mut self, k: &str, default: usize) -> Option<usize> {
        match self.get(k) {
            None => Some(default),
            Some(Value::Integer(i)) if *i >= 0 => Some(*i as usize),
            Some(_) => {
                self.error(k, "expected a non-negative integer");
                None
            }
        }
    }

    fn string(&mut self, k: &str) -> Option<&'a str> {
        match self.required(k)? {
            Value::String(s) => Some(s),
            other => {
                self.error(k, format!("expected a string, found {}", other.type_str()));
                None
            }
        }
    }

    fn string_or(&mut self, k: &str, default: &'a str) -> Option<&'a str> {
        if self.has(k) {
            self.string(k)
        } else {
            Some(default)
        }
    }

    fn keyword<T>(&mut self, k: &str, parse: fn(&str) -> Option<T>, choices: &str, default: Option<T>) -> Option<T> {
        let s = match default {
            Some(d) if !self.has(k) => return Some(d),
            _ => self.string(k)?,
        };
        let v = parse(s);
        if v.is_none() {
            self.error(k, format!("unknown value `{s}` (expected one of: {choices})"));
        }
        v
    }

    fn nums(&mut self, k: &str) -> Option<Vec<f64>> {
        let v = self.required(k)?;
        self.num_list(k, v)
    }

    fn num_list(&self, k: &str, v: &Value) -> Option<Vec<f64>> {
        let Value::Array(items) = v else {
            self.error(k, format!("expected an array of numbers, found {}", v.type_str()));
            return None;
        };
        let out: Vec<Option<f64>> = items.iter().map(|x| self.as_num(k, x)).collect();
        out.into_iter().collect()
    }

    fn num_or_nums(&mut self, k: &str) -> Option<Vec<f64>> {
        let v = self.required(k)?;
        match v {
            Value::Array(_) => self.num_list(k, v),
            _ => self.as_num(k, v).map(|x| vec![x]),
        }
    }

    fn section(&mut self, k: &str) -> Option<Reader<'a>> {
        match self.get(k)? {
            Value::Table(t) => Some(Reader::new(&self.key(k), t, self.sink)),
            other => {
                self.error(k, format!("expected a section, found {}", other.type_str()));
                None
            }
        }
    }

    fn finish(self) {
        for k in self.table.keys() {
            if !self.used.contains(k.as_str()) {
                self.error(k, "unknown key");
            }
        }
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    (line, column)
}

fn read_mirror(r: &mut Reader) -> Option<Model> {
    let family = r.string("family")?;
    let m = match family {
        "gaussian" => MirrorFamily::Gaussian {
            a: r.num("a")?,
            tau: r.num("tau")?,
        },
        "windowed-sine" => {
            let (a, omega, tau) = (r.num("a"), r.num("omega"), r.num("tau"));
            MirrorFamily::WindowedSine {
                a: a?,
                omega: omega?,
                tau: tau?,
            }
        }
        "tabulated" => {
            let (t0, dt, samples) = (r.num("t0"), r.num("dt"), r.nums("samples"));
            MirrorFamily::Tabulated {
                t0: t0?,
                dt: dt?,
                samples: samples?,
            }
        }
        other => {
            r.error(
                "family",
                format!("unknown mirror family `{other}` (expected one of: gaussian, windowed-sine, tabulated)"),
            );
            return None;
        }
    };
    Some(Model::Mirror(m))
}

fn read_cavity(r: &mut Reader) -> Option<Model> {
    let lengths = if r.has("edge") && r.has("lengths") {
        r.error("edge", "give either `edge` or `lengths`, not both");
        r.get("edge");
        r.get("lengths");
        None
    } else if r.has("edge") {
        r.num("edge").map(|e| [e; 3])
    } else {
        r.nums("lengths").and_then(|v| match <[f64; 3]>::try_from(v) {
            Ok(a) => Some(a),
            Err(_) => {
                r.error("lengths", "expected exactly three edge lengths");
                None
            }
        })
    };
    let epsilon = r.num("epsilon");
    let drive = match (r.has("xi"), r.has("duration")) {
        (true, false) => r.num("xi").map(CavityDrive::Xi),
        (false, true) => r.num("duration").map(CavityDrive::Duration),
        (true, true) => {
            r.get("xi");
            r.get("duration");
            r.error("xi", "give either `xi` or `duration`, not both");
            None
        }
        (false, false) => {
            r.error("xi", "missing required key (or `duration`)");
            None
        }
    };
    Some(Model::Cavity(CavityModel {
        lengths: lengths?,
        epsilon: epsilon?,
        drive: drive?,
    }))
}

fn read_coefficient(s: &str) -> Option<ThermalCoefficient> {
    match s {
        "printed" => Some(ThermalCoefficient::AsPrinted),
        "mode-sum" => Some(ThermalCoefficient::ModeSum),
        _ => None,
    }
}

fn coefficient_name(c: ThermalCoefficient) -> &'static str {
    match c {
        ThermalCoefficient::AsPrinted => "printed",
        ThermalCoefficient::ModeSum => "mode-sum",
    }
}

fn read_occupation(s: &str) -> Option<OccupationFrequency> {
    match s {
        "physical" => Some(OccupationFrequency::Physical),
        "comoving" => Some(OccupationFrequency::Comoving),
        _ => None,
    }
}

fn occupation_name(o: OccupationFrequency) -> &'static str {
    match o {
        OccupationFrequency::Physical => "physical",
        OccupationFrequency::Comoving => "comoving",
    }
}

fn read_dielectric(r: &mut Reader, kind: ScenarioKind) -> Option<Model> {
    let eps_inf = r.num("eps_inf");
    let theta0 = r.num("theta0");
    if kind == ScenarioKind::DielectricLargeR {
        let (omega, duration) = (r.num("omega"), r.num("duration"));
        return Some(Model::LargeR(LargeRModel {
            eps_inf: eps_inf?,
            theta0: theta0?,
            omega: omega?,
            duration: duration?,
        }));
    }
    let coefficient = r.keyword(
        "thermal_coefficient",
        read_coefficient,
        "printed, mode-sum",
        Some(ThermalCoefficient::AsPrinted),
    );
    let bubble = match r.string("bubble")? {
        "gaussian" => {
            let (v0, tau) = (r.num("v0"), r.num("tau"));
            Bubble::Gaussian { v0: v0?, tau: tau? }
        }
        "tabulated" => {
            let (t0, dt, volume) = (r.num("t0"), r.num("dt"), r.nums("volume"));
            Bubble::Tabulated {
                t0: t0?,
                dt: dt?,
                volume: volume?,
            }
        }
        other => {
            r.error(
                "bubble",
                format!("unknown bubble shape `{other}` (expected one of: gaussian, tabulated)"),
            );
            return None;
        }
    };
    Some(Model::SmallR(SmallRModel {
        eps_inf: eps_inf?,
        theta0: theta0?,
        bubble,
        coefficient: coefficient?,
    }))
}

fn read_frw(r: &mut Reader) -> Option<Model> {
    let occupation = r.keyword(
        "occupation",
        read_occupation,
        "physical, comoving",
        Some(OccupationFrequency::Physical),
    );
    let profile = match r.string("family")? {
        "tanh" => {
            let (a, b, c) = (r.num("omega_in"), r.num("omega_out"), r.num("tau_r"));
            FrwFamily::Tanh {
                omega_in: a?,
                omega_out: b?,
                tau_r: c?,
            }
        }
        "bump" => {
            let (a, b, c) = (r.num("omega0"), r.num("height"), r.num("width"));
            FrwFamily::Bump {
                omega0: a?,
                height: b?,
                width: c?,
            }
        }
        "constant" => FrwFamily::Constant { omega: r.num("omega")? },
        other => {
            r.error(
                "family",
                format!("unknown scale-factor family `{other}` (expected one of: tanh, bump, constant)"),
            );
            return None;
        }
    };
    Some(Model::Frw(FrwModel {
        profile,
        occupation: occupation?,
    }))
}

fn read_grid(r: &mut Reader) -> Option<Grid> {
    if r.has("omegas") {
        for k in ["min", "max", "points", "spacing"] {
            if r.has(k) {
                r.get(k);
                r.error(k, "not allowed together with `omegas`");
            }
        }
        return r.nums("omegas").map(Grid::List);
    }
    let (min, max) = (r.num("min"), r.num("max"));
    let points = match r.required("points") {
        Some(Value::Integer(i)) if *i >= 1 => Some(*i as usize),
        Some(_) => {
            r.error("points", "expected a positive integer");
            None
        }
        None => None,
    };
    let spacing = r.keyword(
        "spacing",
        Spacing::from_name,
        &Spacing::choices(),
        Some(Spacing::Linear),
    );
    Some(Grid::Range {
        min: min?,
        max: max?,
        points: points?,
        spacing: spacing?,
    })
}

/// Syntax and shape only; physical checks are in [`validate`].
fn read(text: &str) -> Result<ScenarioConfig, ConfigErrors> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ConfigErrors(vec![ConfigError {
            location: Location::Text { line, column },
            message: e.message().trim().to_string(),
        }])
    })?;
    let sink = Sink::default();
    let mut root = Reader::new("", &table, &sink);

    let kind = root.string("scenario").and_then(|s| {
        let k = ScenarioKind::from_name(s);
        if k.is_none() {
            let all: Vec<_> = ScenarioKind::ALL.iter().map(|k| k.as_str()).collect();
            root.error(
                "scenario",
                format!("unknown scenario kind `{s}` (expected one of: {})", all.join(", ")),
            );
        }
        k
    });
    let temperatures = root.num_or_nums("temperature");
    if temperatures.as_ref().is_some_and(|t| t.is_empty()) {
        root.error("temperature", "temperature list is empty");
    }

    let units = match root.section("units") {
        None => Some(Units::default()),
        Some(mut u) => {
            let t = u.keyword(
                "temperature",
                TemperatureUnit::from_name,
                &TemperatureUnit::choices(),
                Some(TemperatureUnit::Natural),
            );
            let l = u.keyword(
                "length",
                LengthUnit::from_name,
                &LengthUnit::choices(),
                Some(LengthUnit::Natural),
            );
            let f = u.keyword(
                "frequency",
                FrequencyUnit::from_name,
                &FrequencyUnit::choices(),
                Some(FrequencyUnit::Natural),
            );
            u.finish();
            match (t, l, f) {
                (Some(temperature), Some(length), Some(frequency)) => Some(Units {
                    temperature,
                    length,
                    frequency,
                }),
                _ => None,
            }
        }
    };

    let mut model = None;
    if let Some(kind) = kind {
        for other in ["mirror", "cavity", "dielectric", "frw"] {
            if other != kind.section() && root.has(other) {
                root.get(other);
                root.error(other, format!("section does not apply to scenario `{kind}`"));
            }
        }
        if root.has(kind.section()) {
            if let Some(mut s) = root.section(kind.section()) {
                model = match kind {
                    ScenarioKind::Mirror => read_mirror(&mut s),
                    ScenarioKind::Cavity => read_cavity(&mut s),
                    ScenarioKind::DielectricSmallR | ScenarioKind::DielectricLargeR => read_dielectric(&mut s, kind),
                    ScenarioKind::Frw => read_frw(&mut s),
                };
                s.finish();
            }
        } else {
            root.error(kind.section(), "missing required section");
        }
    } else {
        for other in ["mirror", "cavity", "dielectric", "frw"] {
            root.get(other);
        }
    }

    // Outer None: the section was present but unusable.
    let grid = if !root.has("grid") {
        Some(None)
    } else {
        root.section("grid").and_then(|mut g| {
            let v = read_grid(&mut g);
            g.finish();
            v.map(Some)
        })
    };

    let numerics = match root.section("numerics") {
        None => Some(Numerics::default()),
        Some(mut n) => {
            let d = Numerics::default();
            let v = (
                n.uint_or("panels", d.panels),
                n.uint_or("order", d.order),
                n.uint_or("local_grid", d.local_grid),
            );
            n.finish();
            match v {
                (Some(panels), Some(order), Some(local_grid)) => Some(Numerics {
                    panels,
                    order,
                    local_grid,
                }),
                _ => None,
            }
        }
    };

    let output = match root.section("output") {
        None => Some(Output::default()),
        Some(mut o) => {
            let d = Output::default();
            let (dir, prefix) = (o.string_or("dir", &d.dir), o.string_or("prefix", &d.prefix));
            o.finish();
            match (dir, prefix) {
                (Some(dir), Some(prefix)) => Some(Output {
                    dir: dir.to_string(),
                    prefix: prefix.to_string(),
                }),
                _ => None,
            }
        }
    };
    root.finish();

    let errors = sink.into_inner();
    match (model, temperatures, units, grid, numerics, output) {
        (Some(model), Some(temperatures), Some(units), Some(grid), Some(numerics), Some(output))
            if errors.is_empty() =>
        {
            Ok(ScenarioConfig {
                model,
                temperatures,
                units,
                grid,
                numerics,
                output,
            })
        }
        _ if errors.is_empty() => Err(ConfigErrors(vec![ConfigError::at("", "invalid configuration")])),
        _ => Err(ConfigErrors(errors)),
    }
}

/// A validated scenario with every quantity in natural units and the
/// module objects already constructed.
pub struct Plan {
    pub kind: ScenarioKind,
    /// (as given, natural)
    pub temperatures: Vec<(f64, Temperature)>,
    pub model: PlannedModel,
    /// Spectral grid in natural units.
    pub omegas: Vec<f64>,
    pub numerics: Numerics,
    pub warnings: Vec<String>,
}

pub enum PlannedModel {
    Mirror(Trajectory),
    Cavity {
        geometry: BoxGeometry,
        mode: BoxMode,
        profile: VibrationProfile,
    },
    SmallR {
        profile: PermittivityProfile,
        coefficient: ThermalCoefficient,
    },
    LargeR(PermittivityProfile),
    Frw {
        profile: ScaleFactorProfile,
        occupation: OccupationFrequency,
    },
}

/// Checks every physical parameter against the preconditions of the module
/// that will consume it, before anything is computed.
pub fn validate(cfg: &ScenarioConfig) -> Result<Plan, ConfigErrors> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let u = cfg.units;
    let kind = cfg.kind();
    let section = kind.section();

    let temperatures: Vec<(f64, Temperature)> = cfg
        .temperatures
        .iter()
        .enumerate()
        .filter_map(|(i, &t)| match Temperature::new(u.temperature(t)) {
            Ok(nat) => Some((t, nat)),
            Err(e) => {
                errors.push(ConfigError::at(
                    format!("temperature[{i}]"),
                    format!("Temperature invariant violated (T must be finite and >= 0): {e}"),
                ));
                None
            }
        })
        .collect();

    let precondition =
        |module: &str, e: qrad_core::Error| ConfigError::at(section, format!("{module} precondition violated: {e}"));

    let omegas: Vec<f64> = cfg.grid.as_ref().map(|g| g.values()).unwrap_or_default();
    let omegas: Vec<f64> = omegas.iter().map(|w| u.frequency(*w)).collect();
    let mut grid_errors = Vec::new();
    match (&cfg.grid, kind) {
        (Some(_), ScenarioKind::Mirror | ScenarioKind::Cavity) => grid_errors.push(ConfigError::at(
            "grid",
            format!("section does not apply to scenario `{kind}`"),
        )),
        (None, ScenarioKind::DielectricLargeR | ScenarioKind::Frw) => grid_errors.push(ConfigError::at(
            "grid",
            format!("missing required section for scenario `{kind}`"),
        )),
        (Some(g), _) => {
            if let Grid::Range { min, max, spacing, .. } = g {
                if !(max >= min) {
                    grid_errors.push(ConfigError::at("grid.max", "must be >= grid.min"));
                }
                if *spacing == Spacing::Log && !(*min > 0.0) {
                    grid_errors.push(ConfigError::at("grid.min", "log spacing needs min > 0"));
                }
            }
            if omegas.is_empty() {
                grid_errors.push(ConfigError::at("grid.omegas", "grid is empty"));
            }
            if omegas.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
                grid_errors.push(ConfigError::at("grid", "every frequency must be finite and > 0"));
            }
        }
        (None, _) => {}
    }

    let model = match &cfg.model {
        Model::Mirror(m) => {
            let t = match m {
                MirrorFamily::Gaussian { a, tau } => Trajectory::gaussian(u.length(*a), u.length(*tau)),
                MirrorFamily::WindowedSine { a, omega, tau } => {
                    Trajectory::windowed_sine(u.length(*a), u.frequency(*omega), u.length(*tau))
                }
                MirrorFamily::Tabulated { t0, dt, samples } => Trajectory::tabulated(
                    u.length(*t0),
                    u.length(*dt),
                    samples.iter().map(|x| u.length(*x)).collect(),
                ),
            };
            if let Err(e) = WavenumberGrid::log_panels(1e-5, 1.0, cfg.numerics.panels, cfg.numerics.order) {
                grid_errors.push(ConfigError::at(
                    "numerics",
                    format!("mirror grid precondition violated: {e}"),
                ));
            }
            t.map_err(|e| errors.push(precondition("mirror trajectory", e)))
                .ok()
                .map(PlannedModel::Mirror)
        }
        Model::Cavity(c) => {
            let lengths = c.lengths.map(|l| u.length(l));
            match BoxGeometry::new(lengths).and_then(|g| Ok((g, fundamental(&g)?))) {
                Err(e) => {
                    errors.push(precondition("cavity geometry", e));
                    None
                }
                Ok((geometry, mode)) => {
                    let duration = match c.drive {
                        CavityDrive::Duration(d) => Some(u.length(d)),
                        CavityDrive::Xi(xi) if c.epsilon > 0.0 && xi >= 0.0 => {
                            Some(2.0 * xi / (mode.omega * c.epsilon))
                        }
                        CavityDrive::Xi(_) => {
                            errors.push(ConfigError::at(
                                "cavity.xi",
                                "cavity vibration precondition violated: xi needs epsilon > 0 and xi >= 0",
                            ));
                            None
                        }
                    };
                    duration.and_then(|d| match VibrationProfile::new(c.epsilon, mode.omega, d) {
                        Ok(profile) => {
                            warnings.extend(profile.warnings());
                            Some(PlannedModel::Cavity {
                                geometry,
                                mode,
                                profile,
                            })
                        }
                        Err(e) => {
                            errors.push(precondition("cavity vibration", e));
                            None
                        }
                    })
                }
            }
        }
        Model::SmallR(m) => {
            let p = match &m.bubble {
                Bubble::Gaussian { v0, tau } => {
                    PermittivityProfile::gaussian_bubble(m.eps_inf, m.theta0, u.volume(*v0), u.length(*tau))
                }
                Bubble::Tabulated { t0, dt, volume } => {
                    let v: Vec<f64> = volume.iter().map(|x| u.volume(*x)).collect();
                    PermittivityProfile::tabulated_bubble(m.eps_inf, m.theta0, u.length(*t0), u.length(*dt), &v)
                }
            };
            p.map_err(|e| errors.push(precondition("dielectric permittivity", e)))
                .ok()
                .map(|profile| PlannedModel::SmallR {
                    profile,
                    coefficient: m.coefficient,
                })
        }
        Model::LargeR(m) => {
            PermittivityProfile::harmonic(m.eps_inf, m.theta0, u.frequency(m.omega), u.length(m.duration))
                .map_err(|e| errors.push(precondition("dielectric permittivity", e)))
                .ok()
                .map(PlannedModel::LargeR)
        }
        Model::Frw(m) => {
            let p = match m.profile {
                FrwFamily::Tanh {
                    omega_in,
                    omega_out,
                    tau_r,
                } => ScaleFactorProfile::tanh(omega_in, omega_out, u.length(tau_r)),
                FrwFamily::Bump { omega0, height, width } => ScaleFactorProfile::bump(omega0, height, u.length(width)),
                FrwFamily::Constant { omega } => ScaleFactorProfile::constant(omega),
            };
            p.map_err(|e| errors.push(precondition("frw scale factor", e)))
                .ok()
                .map(|profile| PlannedModel::Frw {
                    profile,
                    occupation: m.occupation,
                })
        }
    };
    if kind == ScenarioKind::Cavity && cfg.numerics.local_grid > 512 {
        grid_errors.push(ConfigError::at("numerics.local_grid", "at most 512 cells per edge"));
    }
    errors.extend(grid_errors);

    match model {
        Some(model) if errors.is_empty() => Ok(Plan {
            kind,
            temperatures,
            model,
            omegas,
            numerics: cfg.numerics.clone(),
            warnings,
        }),
        _ => Err(ConfigErrors(errors)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub config: ScenarioConfig,
    /// Advisories attached to an accepted configuration.
    pub warnings: Vec<String>,
}

/// Parses and fully validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Parsed, ConfigErrors> {
    let config = read(text)?;
    let plan = validate(&config)?;
    Ok(Parsed {
        config,
        warnings: plan.warnings,
    })
}

fn float(x: f64) -> Value {
    Value::Float(x)
}

fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| float(*x)).collect())
}

fn string(s: &str) -> Value {
    Value::String(s.to_string())
}

/// Writes a configuration back out, with every default made explicit.
pub fn render(cfg: &ScenarioConfig) -> String {
    let mut root = Table::new();
    root.insert("scenario".into(), string(cfg.kind().as_str()));
    root.insert(
        "temperature".into(),
        match cfg.temperatures.as_slice() {
            [t] => float(*t),
            ts => floats(ts),
        },
    );

    let mut units = Table::new();
    units.insert("temperature".into(), string(cfg.units.temperature.as_str()));
    units.insert("length".into(), string(cfg.units.length.as_str()));
    units.insert("frequency".into(), string(cfg.units.frequency.as_str()));
    root.insert("units".into(), Value::Table(units));

    let mut m = Table::new();
    let mut put = |k: &str, v: Value| {
        m.insert(k.to_string(), v);
    };
    match &cfg.model {
        Model::Mirror(f) => match f {
            MirrorFamily::Gaussian { a, tau } => {
                put("family", string("gaussian"));
                put("a", float(*a));
                put("tau", float(*tau));
            }
            MirrorFamily::WindowedSine { a, omega, tau } => {
                put("family", string("windowed-sine"));
                put("a", float(*a));
                put("omega", float(*omega));
                put("tau", float(*tau));
            }
            MirrorFamily::Tabulated { t0, dt, samples } => {
                put("family", string("tabulated"));
                put("t0", float(*t0));
                put("dt", float(*dt));
                put("samples", floats(samples));
            }
        },
        Model::Cavity(c) => {
            put("lengths", floats(&c.lengths));
            put("epsilon", float(c.epsilon));
            match c.drive {
                CavityDrive::Xi(x) => put("xi", float(x)),
                CavityDrive::Duration(d) => put("duration", float(d)),
            }
        }
        Model::SmallR(s) => {
            put("eps_inf", float(s.eps_inf));
            put("theta0", float(s.theta0));
            put("thermal_coefficient", string(coefficient_name(s.coefficient)));
            match &s.bubble {
                Bubble::Gaussian { v0, tau } => {
                    put("bubble", string("gaussian"));
                    put("v0", float(*v0));
                    put("tau", float(*tau));
                }
                Bubble::Tabulated { t0, dt, volume } => {
                    put("bubble", string("tabulated"));
                    put("t0", float(*t0));
                    put("dt", float(*dt));
                    put("volume", floats(volume));
                }
            }
        }
        Model::LargeR(l) => {
            put("eps_inf", float(l.eps_inf));
            put("theta0", float(l.theta0));
            put("omega", float(l.omega));
            put("duration", float(l.duration));
        }
        Model::Frw(f) => {
            put("occupation", string(occupation_name(f.occupation)));
            match f.profile {
                FrwFamily::Tanh {
                    omega_in,
                    omega_out,
                    tau_r,
                } => {
                    put("family", string("tanh"));
                    put("omega_in", float(omega_in));
                    put("omega_out", float(omega_out));
                    put("tau_r", float(tau_r));
                }
                FrwFamily::Bump { omega0, height, width } => {
                    put("family", string("bump"));
                    put("omega0", float(omega0));
                    put("height", float(height));
                    put("width", float(width));
                }
                FrwFamily::Constant { omega } => {
                    put("family", string("constant"));
                    put("omega", float(omega));
                }
            }
        }
    }
    root.insert(cfg.kind().section().into(), Value::Table(m));

    if let Some(g) = &cfg.grid {
        let mut t = Table::new();
        match g {
            Grid::List(v) => {
                t.insert("omegas".into(), floats(v));
            }
            Grid::Range {
                min,
                max,
                points,
                spacing,
            } => {
                t.insert("min".into(), float(*min));
                t.insert("max".into(), float(*max));
                t.insert("points".into(), Value::Integer(*points as i64));
                t.insert("spacing".into(), string(spacing.as_str()));
            }
        }
        root.insert("grid".into(), Value::Table(t));
    }

    let mut n = Table::new();
    n.insert("panels".into(), Value::Integer(cfg.numerics.panels as i64));
    n.insert("order".into(), Value::Integer(cfg.numerics.order as i64));
    n.insert("local_grid".into(), Value::Integer(cfg.numerics.local_grid as i64));
    root.insert("numerics".into(), Value::Table(n));

    let mut o = Table::new();
    o.insert("dir".into(), string(&cfg.output.dir));
    o.insert("prefix".into(), string(&cfg.output.prefix));
    root.insert("output".into(), Value::Table(o));

    toml::to_string(&root).expect("tables of plain values always serialize")
}
