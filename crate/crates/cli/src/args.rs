use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use spinduality::exact::{parse_rational, Rational};
use spinduality::graph::{generate, load_graph, PlanarGraph};
use spinduality::spinnet::Normalization;
use spinduality::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "spinduality",
    version,
    about = "Exact checks of the Ising / spin network duality"
)]
pub struct Cli {
    /// Print a machine-readable JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct GraphSource {
    /// Graph file in the `vertex` / `edge` line format.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    /// Built-in graph: theta, k4, prism3, cube, dodecahedron.
    #[arg(long, value_name = "NAME")]
    pub generate: Option<String>,
}

impl GraphSource {
    pub fn load(&self) -> Result<PlanarGraph> {
        match (&self.graph, &self.generate) {
            (Some(path), _) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Invalid(format!("{}: {}", path.display(), e)))?;
                load_graph(&text)
            }
            (None, Some(name)) => generate(name),
            (None, None) => Err(Error::Invalid("give --graph or --generate".into())),
        }
    }
}

#[derive(Args, Debug)]
pub struct Couplings {
    /// Couplings Y_e = tanh y_e as exact rationals `p/q`: one value for all
    /// edges or a comma-separated list by edge id. A leading `Y=` is allowed.
    #[arg(
        long = "Y",
        alias = "coupling",
        value_name = "p/q",
        default_value = "1/3"
    )]
    pub y: String,
}

impl Couplings {
    pub fn resolve(&self, g: &PlanarGraph) -> Result<Vec<Rational>> {
        let raw = self.y.trim();
        let raw = raw.strip_prefix("Y=").unwrap_or(raw);
        let vals = raw
            .split(',')
            .map(|s| {
                parse_rational(s).ok_or_else(|| Error::Invalid(format!("not a rational: `{}`", s)))
            })
            .collect::<Result<Vec<_>>>()?;
        match vals.len() {
            1 => Ok(vec![vals[0].clone(); g.num_edges()]),
            n if n == g.num_edges() => Ok(vals),
            n => Err(Error::Invalid(format!(
                "{} couplings for {} edges",
                n,
                g.num_edges()
            ))),
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Inspect a graph.
    #[command(subcommand)]
    Graph(GraphAction),
    /// Kasteleyn orientations.
    #[command(subcommand)]
    Kasteleyn(KasteleynAction),
    /// Ising partition function, correlations and the loop polynomial.
    #[command(subcommand)]
    Ising(IsingCmd),
    /// Berezin integrals of the fermionic actions.
    Grassmann {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, value_enum, default_value = "real")]
        form: Form,
    },
    /// Spin network evaluations and the generating series.
    #[command(subcommand)]
    Spinnet(SpinnetCmd),
    /// Identities linking both sides.
    #[command(subcommand)]
    Bridge(BridgeCmd),
    /// Criticality and the hexagonal lattice curves.
    #[command(subcommand)]
    Crit(CritCmd),
    /// Run the whole identity suite and print a pass/fail matrix.
    VerifyAll {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        couplings: Couplings,
    },
}

#[derive(Subcommand, Debug)]
pub enum GraphAction {
    /// Vertex, edge and face counts.
    Info {
        #[command(flatten)]
        source: GraphSource,
    },
    /// The graph in file format.
    Text {
        #[command(flatten)]
        source: GraphSource,
    },
    /// Canonical form (equal for isomorphic embedded graphs).
    Canonical {
        #[command(flatten)]
        source: GraphSource,
    },
    /// Every simple cycle as a list of edge ids.
    Cycles {
        #[command(flatten)]
        source: GraphSource,
    },
}

#[derive(Subcommand, Debug)]
pub enum KasteleynAction {
    /// Build a Kasteleyn orientation.
    Make {
        #[command(flatten)]
        source: GraphSource,
    },
    /// Check the orientation stored in the graph.
    Check {
        #[command(flatten)]
        source: GraphSource,
    },
    /// Parity identities on every simple cycle.
    Lemma {
        #[command(flatten)]
        source: GraphSource,
    },
    /// Compare the vertex-flip class with a brute-force scan.
    Scan {
        #[command(flatten)]
        source: GraphSource,
    },
}

impl GraphAction {
    pub fn source(&self) -> &GraphSource {
        match self {
            GraphAction::Info { source }
            | GraphAction::Text { source }
            | GraphAction::Canonical { source }
            | GraphAction::Cycles { source } => source,
        }
    }
}

impl KasteleynAction {
    pub fn source(&self) -> &GraphSource {
        match self {
            KasteleynAction::Make { source }
            | KasteleynAction::Check { source }
            | KasteleynAction::Lemma { source }
            | KasteleynAction::Scan { source } => source,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Real,
    Complex,
    Squared,
}

#[derive(Subcommand, Debug)]
pub enum IsingCmd {
    /// Normalized partition function by brute force.
    Z {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        couplings: Couplings,
    },
    /// Spin correlations.
    Corr {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        couplings: Couplings,
        /// Nearest-neighbour correlation across this edge.
        #[arg(long)]
        edge: Option<usize>,
        /// Product of spins at these vertices.
        #[arg(long, value_delimiter = ',')]
        vertices: Option<Vec<usize>>,
    },
    /// Loop polynomial P_Gamma.
    P {
        #[command(flatten)]
        source: GraphSource,
    },
    /// Loop polynomial from the dimer Pfaffian.
    Dimer {
        #[command(flatten)]
        source: GraphSource,
    },
}

#[derive(Subcommand, Debug)]
pub enum SpinnetCmd {
    /// Evaluate a colored network.
    Eval {
        #[command(flatten)]
        source: GraphSource,
        /// Colors 2j_e by edge id.
        #[arg(long, value_delimiter = ',', required = true)]
        colors: Vec<u32>,
        #[arg(long, value_parser = parse_norm, default_value = "integral")]
        norm: Normalization,
        /// Use the orientation stored in the file instead of a Kasteleyn one.
        #[arg(long)]
        stored_orientation: bool,
    },
    /// Coefficients of Z^Spin up to a total degree.
    Series {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, default_value_t = 4)]
        degree: u32,
    },
    /// Tensor evaluations against series coefficients.
    Compare {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, default_value_t = 2)]
        max_color: u32,
        #[arg(long)]
        stored_orientation: bool,
    },
    /// Whitehead move on an edge.
    Whitehead {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        edge: usize,
    },
}

fn parse_norm(s: &str) -> std::result::Result<Normalization, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum BridgeCmd {
    /// Pass/fail table of the bridge identities.
    Verify {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        couplings: Couplings,
        /// Check every edge rather than edge 0.
        #[arg(long)]
        all: bool,
    },
    /// P(Y)^2 Z^Spin(Y) = 1 with the series tail bound.
    Fundamental {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        couplings: Couplings,
    },
    /// Angle couplings X = (Y_s Y_t)^(1/2).
    Angles {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        couplings: Couplings,
    },
    /// Moments and distribution of the color on one edge.
    Moments {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        couplings: Couplings,
        #[arg(long, default_value_t = 0)]
        edge: usize,
        #[arg(long, default_value_t = 5)]
        order: usize,
    },
    /// Connected correlation along a simple path of edges.
    Path {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        couplings: Couplings,
        #[arg(long, value_delimiter = ',', required = true)]
        edges: Vec<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CritCmd {
    /// Hexagonal lattice curve as CSV.
    Hex {
        #[arg(long, default_value_t = 0.05)]
        from: f64,
        #[arg(long, default_value_t = 1.7)]
        to: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        /// Output file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stationary couplings from triangle pairs `l s1 s2 t1 t2`.
    Stationary {
        #[arg(long, value_name = "FILE")]
        triangles: PathBuf,
    },
    /// Critical coupling from k(y) = 1.
    Yc,
    /// Isoradial critical coupling for a half-rhombus angle.
    Isoradial {
        #[arg(long)]
        theta: f64,
    },
}
