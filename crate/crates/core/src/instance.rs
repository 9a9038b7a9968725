//! Problem instances: which routing variant, over which graph, for which
//! models and clients.
//!
//! A variant is identified by five switches — distribution vs collection,
//! one or two models, splittable vs unsplittable flow, the objective
//! (weighted-sum or min-max arrival for distribution; plain feasibility or
//! utility-maximizing client selection for collection), and common vs
//! separate servers — written canonically as e.g. `1-UF-WS`, `mul-1-MM`,
//! `2-SF-NCS-sep`.

use std::collections::BTreeSet;
use std::fmt;

use num::{Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;
use crate::tvg::TimeVaryingGraph;

/// Direction of model movement: server→clients or clients→server.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Download,
    Upload,
}

/// Whether one model's traffic may split across several paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowKind {
    Unsplittable,
    Splittable,
}

/// Distribution objective over per-client arrival snapshots `k_c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Minimize `Σ_c w_c · k_c`.
    WeightedSum,
    /// Minimize `max_c k_c`.
    MinMax,
}

/// Server placement when two models are in play.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServerMode {
    Common,
    Separate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DownloadVariant {
    pub model_count: u8,
    pub flow: FlowKind,
    pub objective: Objective,
    pub multicast: bool,
    pub servers: ServerMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UploadVariant {
    pub model_count: u8,
    pub flow: FlowKind,
    /// Utility-maximizing client selection (vs. all-or-nothing feasibility).
    pub client_selection: bool,
    pub servers: ServerMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Download(DownloadVariant),
    Upload(UploadVariant),
}

impl DownloadVariant {
    pub fn unicast(model_count: u8, flow: FlowKind, objective: Objective) -> Self {
        DownloadVariant { model_count, flow, objective, multicast: false, servers: ServerMode::Common }
    }

    pub fn multicast(model_count: u8, objective: Objective) -> Self {
        DownloadVariant {
            model_count,
            flow: FlowKind::Unsplittable,
            objective,
            multicast: true,
            servers: ServerMode::Common,
        }
    }

    pub fn with_separate_servers(mut self) -> Self {
        self.servers = ServerMode::Separate;
        self
    }

    /// True when a polynomial-time solver exists for this variant.
    pub fn is_polynomial(&self) -> bool {
        if self.multicast {
            return self.model_count == 1;
        }
        match (self.model_count, self.flow, self.objective) {
            (1, FlowKind::Unsplittable, _) => true,
            (1, FlowKind::Splittable, Objective::MinMax) => true,
            (2, FlowKind::Splittable, Objective::MinMax) => true,
            _ => false,
        }
    }
}

impl UploadVariant {
    pub fn new(model_count: u8, flow: FlowKind, client_selection: bool) -> Self {
        UploadVariant { model_count, flow, client_selection, servers: ServerMode::Common }
    }

    pub fn with_separate_servers(mut self) -> Self {
        self.servers = ServerMode::Separate;
        self
    }

    pub fn is_polynomial(&self) -> bool {
        match (self.model_count, self.flow, self.client_selection) {
            (_, FlowKind::Splittable, false) => true,
            (1, FlowKind::Unsplittable, _) => true,
            _ => false,
        }
    }
}

impl Variant {
    pub fn phase(&self) -> Phase {
        match self {
            Variant::Download(_) => Phase::Download,
            Variant::Upload(_) => Phase::Upload,
        }
    }

    pub fn model_count(&self) -> u8 {
        match self {
            Variant::Download(v) => v.model_count,
            Variant::Upload(v) => v.model_count,
        }
    }

    pub fn servers(&self) -> ServerMode {
        match self {
            Variant::Download(v) => v.servers,
            Variant::Upload(v) => v.servers,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        match self {
            Variant::Download(v) => v.is_polynomial(),
            Variant::Upload(v) => v.is_polynomial(),
        }
    }

    /// Parse a canonical variant name (case-insensitive), e.g. `1-UF-WS`,
    /// `mul-2-MM-sep`, `2-SF-NCS`.
    pub fn parse(name: &str) -> Result<Variant, VariantParseError> {
        let lower = name.to_ascii_lowercase();
        let mut parts: Vec<&str> = lower.split('-').collect();
        let separate = parts.last() == Some(&"sep");
        if separate {
            parts.pop();
        }
        let err = || VariantParseError(name.to_string());
        let variant = match parts.as_slice() {
            ["mul", count, obj] => {
                let model_count = parse_count(count).ok_or_else(err)?;
                let objective = parse_objective(obj).ok_or_else(err)?;
                Variant::Download(DownloadVariant {
                    model_count,
                    flow: FlowKind::Unsplittable,
                    objective,
                    multicast: true,
                    servers: ServerMode::Common,
                })
            }
            [count, flow, tail] => {
                let model_count = parse_count(count).ok_or_else(err)?;
                let flow = match *flow {
                    "uf" => FlowKind::Unsplittable,
                    "sf" => FlowKind::Splittable,
                    _ => return Err(err()),
                };
                match *tail {
                    "ws" | "mm" => Variant::Download(DownloadVariant {
                        model_count,
                        flow,
                        objective: parse_objective(tail).unwrap(),
                        multicast: false,
                        servers: ServerMode::Common,
                    }),
                    "ncs" | "cs" => Variant::Upload(UploadVariant {
                        model_count,
                        flow,
                        client_selection: *tail == "cs",
                        servers: ServerMode::Common,
                    }),
                    _ => return Err(err()),
                }
            }
            _ => return Err(err()),
        };
        let variant = match (variant, separate) {
            (v, false) => v,
            (Variant::Download(v), true) => Variant::Download(v.with_separate_servers()),
            (Variant::Upload(v), true) => Variant::Upload(v.with_separate_servers()),
        };
        Ok(variant)
    }
}

fn parse_count(s: &str) -> Option<u8> {
    match s {
        "1" => Some(1),
        "2" => Some(2),
        _ => None,
    }
}

fn parse_objective(s: &str) -> Option<Objective> {
    match s {
        "ws" => Some(Objective::WeightedSum),
        "mm" => Some(Objective::MinMax),
        _ => None,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unrecognized variant name {0:?}")]
pub struct VariantParseError(pub String);

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Download(v) => {
                if v.multicast {
                    write!(f, "mul-{}", v.model_count)?;
                } else {
                    let flow = match v.flow {
                        FlowKind::Unsplittable => "UF",
                        FlowKind::Splittable => "SF",
                    };
                    write!(f, "{}-{}", v.model_count, flow)?;
                }
                let obj = match v.objective {
                    Objective::WeightedSum => "WS",
                    Objective::MinMax => "MM",
                };
                write!(f, "-{obj}")?;
                if v.servers == ServerMode::Separate {
                    write!(f, "-sep")?;
                }
                Ok(())
            }
            Variant::Upload(v) => {
                let flow = match v.flow {
                    FlowKind::Unsplittable => "UF",
                    FlowKind::Splittable => "SF",
                };
                let cs = if v.client_selection { "CS" } else { "NCS" };
                write!(f, "{}-{}-{}", v.model_count, flow, cs)?;
                if v.servers == ServerMode::Separate {
                    write!(f, "-sep")?;
                }
                Ok(())
            }
        }
    }
}

/// One client of one model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClientSpec {
    pub satellite: u32,
    /// Arrival-snapshot weight in the weighted-sum objective.
    pub weight: Rational,
    /// Selection utility in client-selection collection.
    pub utility: Rational,
    /// Earliest snapshot this client's local model is ready to leave
    /// (collection only; 1 for distribution).
    pub start: u32,
}

impl ClientSpec {
    pub fn new(satellite: u32) -> Self {
        ClientSpec {
            satellite,
            weight: Rational::from_integer(1.into()),
            utility: Rational::from_integer(1.into()),
            start: 1,
        }
    }

    pub fn with_weight(mut self, weight: Rational) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_utility(mut self, utility: Rational) -> Self {
        self.utility = utility;
        self
    }

    pub fn with_start(mut self, start: u32) -> Self {
        self.start = start;
        self
    }
}

/// One model: its size, the server satellite holding (or collecting) it, and
/// its client set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub size: Rational,
    pub server: u32,
    pub clients: Vec<ClientSpec>,
}

impl ModelSpec {
    pub fn client(&self, satellite: u32) -> Option<&ClientSpec> {
        self.clients.iter().find(|c| c.satellite == satellite)
    }

    pub fn client_satellites(&self) -> Vec<u32> {
        self.clients.iter().map(|c| c.satellite).collect()
    }
}

#[derive(Debug, Clone)]
pub struct RoutingInstance {
    pub phase: Phase,
    pub tvg: TimeVaryingGraph,
    pub models: Vec<ModelSpec>,
    pub variant: Variant,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("variant {variant} is a {expected:?} variant but the instance phase is {got:?}")]
    PhaseMismatch { variant: String, expected: Phase, got: Phase },
    #[error("variant {variant} needs {expected} model(s), instance has {got}")]
    ModelCountMismatch { variant: String, expected: u8, got: usize },
    #[error("model {model} server satellite {satellite} does not exist")]
    BadServer { model: usize, satellite: u32 },
    #[error("model {model} client satellite {satellite} does not exist")]
    BadClientSatellite { model: usize, satellite: u32 },
    #[error("model {model} lists client satellite {satellite} twice")]
    DuplicateClient { model: usize, satellite: u32 },
    #[error("model {model} size must be positive")]
    NonPositiveSize { model: usize },
    #[error("client {satellite} of model {model} has negative weight")]
    NegativeWeight { model: usize, satellite: u32 },
    #[error("client {satellite} of model {model} has negative utility")]
    NegativeUtility { model: usize, satellite: u32 },
    #[error("client {satellite} of model {model} starts at snapshot {start}, outside 1..={horizon}")]
    StartOutOfRange { model: usize, satellite: u32, start: u32, horizon: u32 },
    #[error("client {satellite} of model {model} has start {start}; distribution traffic departs at snapshot 1")]
    DownloadStartNotOne { model: usize, satellite: u32, start: u32 },
    #[error("splittable multicast is not a supported variant")]
    SplittableMulticast,
    #[error("separate servers require two models")]
    SeparateServersSingleModel,
    #[error("separate-server variant lists the same server {satellite} for both models")]
    SeparateServersCoincide { satellite: u32 },
}

impl RoutingInstance {
    pub fn new(
        phase: Phase,
        tvg: TimeVaryingGraph,
        models: Vec<ModelSpec>,
        variant: Variant,
    ) -> Result<Self, InstanceError> {
        let inst = RoutingInstance { phase, tvg, models, variant };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        let name = self.variant.to_string();
        if self.variant.phase() != self.phase {
            return Err(InstanceError::PhaseMismatch {
                variant: name,
                expected: self.variant.phase(),
                got: self.phase,
            });
        }
        if let Variant::Download(v) = &self.variant {
            if v.multicast && v.flow == FlowKind::Splittable {
                return Err(InstanceError::SplittableMulticast);
            }
        }
        if self.variant.model_count() as usize != self.models.len() {
            return Err(InstanceError::ModelCountMismatch {
                variant: name,
                expected: self.variant.model_count(),
                got: self.models.len(),
            });
        }
        if self.variant.servers() == ServerMode::Separate {
            if self.models.len() != 2 {
                return Err(InstanceError::SeparateServersSingleModel);
            }
            if self.models[0].server == self.models[1].server {
                return Err(InstanceError::SeparateServersCoincide {
                    satellite: self.models[0].server,
                });
            }
        }
        let sats = self.tvg.satellite_count();
        let horizon = self.tvg.snapshot_count();
        for (m, model) in self.models.iter().enumerate() {
            if !model.size.is_positive() {
                return Err(InstanceError::NonPositiveSize { model: m });
            }
            if model.server == 0 || model.server > sats {
                return Err(InstanceError::BadServer { model: m, satellite: model.server });
            }
            let mut seen = BTreeSet::new();
            for client in &model.clients {
                let c = client.satellite;
                if c == 0 || c > sats {
                    return Err(InstanceError::BadClientSatellite { model: m, satellite: c });
                }
                if !seen.insert(c) {
                    return Err(InstanceError::DuplicateClient { model: m, satellite: c });
                }
                if client.weight.is_negative() {
                    return Err(InstanceError::NegativeWeight { model: m, satellite: c });
                }
                if client.utility.is_negative() {
                    return Err(InstanceError::NegativeUtility { model: m, satellite: c });
                }
                if client.start == 0 || client.start > horizon {
                    return Err(InstanceError::StartOutOfRange {
                        model: m,
                        satellite: c,
                        start: client.start,
                        horizon,
                    });
                }
                if self.phase == Phase::Download && client.start != 1 {
                    return Err(InstanceError::DownloadStartNotOne {
                        model: m,
                        satellite: c,
                        start: client.start,
                    });
                }
            }
        }
        Ok(())
    }

    /// Combined size of every model instance to be moved — the automatic
    /// store-and-forward buffer capacity.
    pub fn total_demand(&self) -> Rational {
        self.models.iter().fold(Rational::zero(), |acc, m| {
            acc + &m.size * Rational::from_integer((m.clients.len() as i64).into())
        })
    }

    /// The instance graph with any automatic buffer policy resolved to a
    /// concrete capacity.
    pub fn resolved_tvg(&self) -> TimeVaryingGraph {
        self.tvg.resolve_cache(self.total_demand())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};
    use crate::tvg::build_tvg;

    fn chain_tvg() -> TimeVaryingGraph {
        build_tvg(3, 2, &[(1, 2, 1, rat(1), rat(0)), (2, 3, 1, rat(1), rat(0))], rat(2)).unwrap()
    }

    fn download_variant() -> Variant {
        Variant::Download(DownloadVariant::unicast(1, FlowKind::Unsplittable, Objective::WeightedSum))
    }

    #[test]
    fn canonical_names_round_trip() {
        let names = [
            "1-UF-WS", "1-UF-MM", "1-SF-WS", "1-SF-MM", "2-UF-WS", "2-UF-MM", "2-SF-WS",
            "2-SF-MM", "2-SF-MM-sep", "mul-1-WS", "mul-1-MM", "mul-2-WS", "mul-2-MM",
            "mul-2-MM-sep", "1-UF-NCS", "1-UF-CS", "1-SF-NCS", "1-SF-CS", "2-UF-NCS",
            "2-SF-NCS", "2-SF-NCS-sep", "2-UF-CS", "2-SF-CS",
        ];
        for name in names {
            let v = Variant::parse(name).unwrap_or_else(|e| panic!("{e}"));
            assert_eq!(v.to_string(), name);
        }
        assert!(Variant::parse("3-UF-WS").is_err());
        assert!(Variant::parse("1-XF-WS").is_err());
        assert!(Variant::parse("mul-1").is_err());
    }

    #[test]
    fn polynomial_classification() {
        let poly = ["1-UF-WS", "1-UF-MM", "1-SF-MM", "2-SF-MM", "2-SF-MM-sep", "mul-1-WS",
            "mul-1-MM", "1-SF-NCS", "2-SF-NCS", "2-SF-NCS-sep", "1-UF-NCS", "1-UF-CS"];
        let hard = ["1-SF-WS", "2-UF-WS", "2-UF-MM", "2-SF-WS", "mul-2-WS", "mul-2-MM",
            "2-UF-NCS", "1-SF-CS", "2-SF-CS", "2-UF-CS"];
        for name in poly {
            assert!(Variant::parse(name).unwrap().is_polynomial(), "{name} should be polynomial");
        }
        for name in hard {
            assert!(!Variant::parse(name).unwrap().is_polynomial(), "{name} should be hard");
        }
    }

    #[test]
    fn accepts_valid_instance() {
        let model = ModelSpec { size: rat(1), server: 1, clients: vec![ClientSpec::new(2), ClientSpec::new(3)] };
        let inst = RoutingInstance::new(Phase::Download, chain_tvg(), vec![model], download_variant());
        assert!(inst.is_ok());
    }

    #[test]
    fn rejects_phase_mismatch() {
        let model = ModelSpec { size: rat(1), server: 1, clients: vec![ClientSpec::new(2)] };
        let err = RoutingInstance::new(Phase::Upload, chain_tvg(), vec![model], download_variant())
            .unwrap_err();
        assert!(matches!(err, InstanceError::PhaseMismatch { .. }));
    }

    #[test]
    fn rejects_duplicate_client() {
        let model = ModelSpec {
            size: rat(1),
            server: 1,
            clients: vec![ClientSpec::new(2), ClientSpec::new(2)],
        };
        let err = RoutingInstance::new(Phase::Download, chain_tvg(), vec![model], download_variant())
            .unwrap_err();
        assert_eq!(err, InstanceError::DuplicateClient { model: 0, satellite: 2 });
    }

    #[test]
    fn rejects_start_beyond_horizon() {
        let model = ModelSpec {
            size: rat(1),
            server: 3,
            clients: vec![ClientSpec::new(2).with_start(5)],
        };
        let variant = Variant::parse("1-UF-NCS").unwrap();
        let err =
            RoutingInstance::new(Phase::Upload, chain_tvg(), vec![model], variant).unwrap_err();
        assert!(matches!(err, InstanceError::StartOutOfRange { start: 5, horizon: 2, .. }));
    }

    #[test]
    fn rejects_late_start_for_distribution() {
        let model = ModelSpec {
            size: rat(1),
            server: 1,
            clients: vec![ClientSpec::new(2).with_start(2)],
        };
        let err = RoutingInstance::new(Phase::Download, chain_tvg(), vec![model], download_variant())
            .unwrap_err();
        assert!(matches!(err, InstanceError::DownloadStartNotOne { start: 2, .. }));
    }

    #[test]
    fn rejects_separate_servers_on_same_satellite() {
        let m1 = ModelSpec { size: rat(1), server: 1, clients: vec![ClientSpec::new(2)] };
        let m2 = ModelSpec { size: rat(1), server: 1, clients: vec![ClientSpec::new(3)] };
        let variant = Variant::parse("2-SF-MM-sep").unwrap();
        let err = RoutingInstance::new(Phase::Download, chain_tvg(), vec![m1, m2], variant)
            .unwrap_err();
        assert!(matches!(err, InstanceError::SeparateServersCoincide { satellite: 1 }));
    }

    #[test]
    fn total_demand_sums_model_instances() {
        let m1 = ModelSpec {
            size: ratio(3, 2),
            server: 1,
            clients: vec![ClientSpec::new(2), ClientSpec::new(3)],
        };
        let m2 = ModelSpec { size: rat(1), server: 2, clients: vec![ClientSpec::new(3)] };
        let variant = Variant::parse("2-SF-MM-sep").unwrap();
        let inst = RoutingInstance::new(Phase::Download, chain_tvg(), vec![m1, m2], variant).unwrap();
        assert_eq!(inst.total_demand(), rat(4));
    }

    #[test]
    fn overlapping_clients_across_models_are_legal() {
        let m1 = ModelSpec { size: rat(1), server: 1, clients: vec![ClientSpec::new(3)] };
        let m2 = ModelSpec { size: rat(1), server: 2, clients: vec![ClientSpec::new(3)] };
        let variant = Variant::parse("2-SF-MM-sep").unwrap();
        assert!(RoutingInstance::new(Phase::Download, chain_tvg(), vec![m1, m2], variant).is_ok());
    }
}
