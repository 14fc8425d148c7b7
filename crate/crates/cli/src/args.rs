use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "mpqg", version, about = "Multiparameter quantum matrices, flags and their representations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Top,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Top {
    /// Exact coefficient arithmetic.
    #[command(subcommand)]
    Coeff(CoeffCmd),
    /// The quantum matrix algebra.
    #[command(subcommand)]
    Qmatrix(QmatrixCmd),
    /// The quantum flag algebra.
    #[command(subcommand)]
    Yflag(YflagCmd),
    /// The representation on flag monomials.
    #[command(subcommand)]
    Rep(RepCmd),
}

#[derive(Args, Debug, Clone, Default)]
pub struct Eval {
    /// Numeric values, e.g. `q=2,q13=3/2,r1=1`; every symbol must be given.
    #[arg(long)]
    pub params: Option<String>,
    /// Set every q_ij to q.
    #[arg(long)]
    pub one_param: bool,
}

#[derive(Subcommand, Debug)]
pub enum CoeffCmd {
    /// Parse a coefficient and print its canonical form.
    Normalize {
        expr: String,
        #[command(flatten)]
        eval: Eval,
    },
}

#[derive(Subcommand, Debug)]
pub enum QmatrixCmd {
    /// List the rewrite rules.
    Rules {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        eval: Eval,
    },
    /// A quantum minor, as written and in normal form.
    Minor {
        #[arg(long, default_value_t = 0)]
        n: u32,
        /// Comma-separated row indices.
        #[arg(long)]
        rows: String,
        /// Comma-separated column indices.
        #[arg(long)]
        cols: String,
        #[command(flatten)]
        eval: Eval,
    },
    /// Normal form of an expression in the a[i,j].
    Nf {
        #[arg(long)]
        n: u32,
        expr: String,
        #[command(flatten)]
        eval: Eval,
    },
    /// Check that the coproduct respects every relation.
    CheckCoproduct {
        #[arg(long)]
        n: u32,
    },
    /// Denominator-cleared Gauss identities at n = 2.
    Gauss2,
    /// Random-word confluence check.
    Confluence(ConfluenceArgs),
}

#[derive(Args, Debug)]
pub struct ConfluenceArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 5)]
    pub len: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub split: bool,
    #[arg(long)]
    pub one_param: bool,
}

#[derive(Subcommand, Debug)]
pub enum YflagCmd {
    /// List the rewrite rules.
    Rules {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        split: bool,
        #[command(flatten)]
        eval: Eval,
    },
    /// Normal form of an expression in the Y[i,j].
    Nf {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        split: bool,
        expr: String,
        #[command(flatten)]
        eval: Eval,
    },
    /// Check that every defining relation reduces to zero.
    Relations {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        split: bool,
    },
    /// Random-word confluence check.
    Confluence(ConfluenceArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Engine {
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    /// Impose the rank-3 splitting constraint.
    #[arg(long)]
    pub split: bool,
    /// Use the closed rank-3 formulas instead of the rewriting engine.
    #[arg(long)]
    pub closed3: bool,
}

#[derive(Subcommand, Debug)]
pub enum RepCmd {
    /// Act with one generator on one basis vector.
    Act {
        #[command(flatten)]
        engine: Engine,
        /// Generator such as `X+1`, `X-2`, `K1`, `Kinv1`, `Phalf2`, `Qneghalf1`.
        #[arg(long)]
        gen: String,
        /// `j=1,n=0,l=2` (rank 3) or exponents in row-major order, `1,0,2`.
        #[arg(long)]
        vec: String,
        #[command(flatten)]
        eval: Eval,
    },
    /// Operator relations and q-Serre residuals on a basis.
    Verify {
        #[command(flatten)]
        engine: Engine,
        #[arg(long, default_value_t = 2)]
        degree: u32,
    },
    /// Leibniz rule against the action on normal forms.
    Welldef {
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long)]
        split: bool,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        /// Relation families to test, e.g. `d,e,f`; all by default.
        #[arg(long)]
        families: Option<String>,
    },
    /// Rewriting engine against the closed formulas, both split, rank 3.
    Compare {
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value_t = 2)]
        degree: u32,
    },
    /// q-Serre residuals only.
    Serre {
        #[command(flatten)]
        engine: Engine,
        #[arg(long, default_value_t = 2)]
        degree: u32,
    },
    /// Dropping the D-tail commutes with every action.
    Intertwine {
        #[command(flatten)]
        engine: Engine,
        #[arg(long, default_value_t = 2)]
        degree: u32,
    },
    /// Classical limit of X+ and X- at seeded integer weights.
    Classical {
        #[command(flatten)]
        engine: Engine,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long)]
        seed: u64,
    },
}
