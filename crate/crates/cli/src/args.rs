//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use deloc_core::Complex64;

#[derive(Debug, Parser)]
#[command(
    name = "deloc",
    version,
    about = "Delocalized L²-invariants with independent oracles"
)]
pub struct Cli {
    /// Also evaluate the independent route and report both values.
    #[arg(long, global = true)]
    pub oracle: bool,

    /// Overrides the default numerical tolerance of the command.
    #[arg(long, global = true, value_name = "TOL", value_parser = positive_f64)]
    pub tolerance: Option<f64>,

    /// Print an aligned text table of the result on standard error.
    #[arg(long, global = true)]
    pub table: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed geodesics of hyperbolic (2n+1)-manifolds.
    #[command(subcommand)]
    Hyperbolic(HyperbolicCmd),
    /// Mapping tori from the action on the cohomology of the fiber.
    #[command(subcommand)]
    MappingTorus(MappingTorusCmd),
    /// Mapping tori whose fiber has finite fundamental group.
    #[command(subcommand)]
    Nielsen(NielsenCmd),
    /// Delocalized heat traces and Betti numbers of ℤˡ-covers.
    HeatTrace(HeatTraceArgs),
    /// Twisted and delocalized invariants of finite covers.
    #[command(subcommand)]
    FiniteCover(FiniteCoverCmd),
    /// Shared transforms and elementary properties.
    #[command(subcommand)]
    Core(CoreCmd),
}

/// A geodesic class, from a file or from flags.
#[derive(Debug, Args)]
pub struct GeodesicArgs {
    /// JSON file `{n, k, l, angles}`.
    #[arg(long, conflicts_with_all = ["n", "k", "l", "angles"])]
    pub file: Option<PathBuf>,
    /// Half the dimension minus one: the manifold has dimension 2n+1.
    #[arg(long)]
    pub n: Option<usize>,
    /// Multiplicity of the geodesic.
    #[arg(long)]
    pub k: Option<u32>,
    /// Hyperbolic length.
    #[arg(long)]
    pub l: Option<f64>,
    /// Holonomy rotation angles, comma separated (all zero when omitted).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub angles: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
pub enum HyperbolicCmd {
    /// Delocalized analytic torsion of the class.
    Torsion(GeodesicArgs),
    /// Delocalized eta invariant of the class.
    Eta(GeodesicArgs),
    /// Recover the length from the torsion of the powers g^r.
    LengthSpectrum {
        #[command(flatten)]
        geodesic: GeodesicArgs,
        #[arg(long, default_value_t = 4)]
        r_min: u32,
        #[arg(long, default_value_t = 30)]
        r_max: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum MappingTorusCmd {
    /// Torsion at the class ⟨k⟩ of the base circle.
    Torsion {
        /// JSON file `{matrices: [...]}`.
        #[arg(long)]
        file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
    },
    /// Lefschetz numbers and the rational zeta function.
    Zeta {
        #[arg(long)]
        file: PathBuf,
        /// Point `re` or `re,im` at which to evaluate ζ.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        at: Option<Complex64>,
        /// Number of Lefschetz numbers to list.
        #[arg(long, default_value_t = 12)]
        terms: usize,
    },
    /// Eta invariant from the supertrace on the kernel of the fiber operator.
    Eta {
        /// Supertrace `re` or `re,im`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        supertrace: Complex64,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
    },
}

#[derive(Debug, Subcommand)]
pub enum NielsenCmd {
    /// Nielsen indices I_k(f) per twisted conjugacy class.
    Index {
        /// JSON file `{group, automorphism, degrees}`.
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
    },
    /// Twisted Lefschetz numbers and ζ_ρ at 1.
    Zeta {
        #[arg(long)]
        file: PathBuf,
        /// JSON file `{j, mu, u}`; the trivial representation when omitted.
        #[arg(long)]
        rep: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        terms: u32,
    },
    /// The pairing ln|ζ_ρ(1)|² with the torsions 𝒯_⟨f,k⟩.
    Pairing {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        rep: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct HeatTraceArgs {
    /// JSON Laurent complex; the standard torus of rank `len(m)` when omitted.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Class `m ∈ ℤˡ`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub m: Vec<i64>,
    /// Cochain degree.
    #[arg(long, default_value_t = 0)]
    pub p: usize,
    /// Diffusion time.
    #[arg(long, value_parser = positive_f64, required_unless_present = "betti")]
    pub t: Option<f64>,
    /// Estimate the delocalized Betti number from the ladder t = 1, 2, 4, ….
    #[arg(long, conflicts_with = "t")]
    pub betti: bool,
    /// Largest time on the ladder.
    #[arg(long, default_value_t = 256.0, value_parser = positive_f64)]
    pub t_max: f64,
}

/// Where the character table comes from.
#[derive(Debug, Args)]
pub struct TableSource {
    /// JSON character table `{class_sizes, rows, representatives?}`.
    #[arg(
        long = "character-table",
        conflicts_with = "group",
        required_unless_present = "group"
    )]
    pub character_table: Option<PathBuf>,
    /// JSON group `{order, mul_table, labels}`; its table is computed.
    #[arg(long)]
    pub group: Option<PathBuf>,
    /// JSON `{kind, values}`.
    #[arg(long)]
    pub values: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum FiniteCoverCmd {
    /// Class values to one value per irreducible representation.
    ToTwisted(TableSource),
    /// Values per irreducible representation back to class values.
    FromTwisted(TableSource),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VanishingArg {
    Torsion,
    SignatureEta,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Betti,
    Torsion,
    Eta,
}

#[derive(Debug, Subcommand)]
pub enum CoreCmd {
    /// ∫ (4πt)^{-1/2} e^{-l²/4t} e^{-tc²} dt/t = e^{-lc}/l.
    GaussianMoment {
        #[arg(long, value_parser = positive_f64)]
        l: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        c: f64,
    },
    /// Whether the dimension alone forces an invariant to vanish.
    Vanishing {
        #[arg(long)]
        dimension: u32,
        #[arg(long, value_enum)]
        kind: VanishingArg,
    },
    /// Value at the inverse class ⟨g⁻¹⟩ from the value at ⟨g⟩.
    Dual {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        label: String,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        value: Complex64,
    },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(v) => Err(format!("{v} is not a positive finite number")),
        Err(e) => Err(e.to_string()),
    }
}

/// `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re` or `re,im`, got {s:?}")),
    }
}
