//! Command-line front end for `qblaschke`.
//!
//! Every command reads JSON operands (inline flags or `--input`), writes one
//! JSON document, and exits with 0 on success, 2 on a domain error and 1 on
//! an I/O or parse failure.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qblaschke::blaschke::{eval_nodes, product_eval};
use qblaschke::qmat::{companion_matrix, ControllablePair};
use qblaschke::realize::{build_realization, degree_of};
use qblaschke::schur::{check_schur_prefix, defect, rank_profile, recover, toeplitz};
use qblaschke::synth::{pair_from_polynomial, synthesize_pair};
use qblaschke::zeros::{
    adaptive_order, lrcm_double, lrcm_nodes, prescribed_left_zeros, spherical_divisors_with,
    DivisorMode, DivisorOptions, SphericalDivisors,
};
use qblaschke::{
    sample, BlaschkeProduct, ConjugacyClass, Evaluate, Polynomial, QMatrix, QSeries, Quaternion,
    Side,
};

const SELF_CHECK_POINTS: usize = 16;
const SELF_CHECK_ORDER: usize = 256;

#[derive(Parser, Debug)]
#[command(
    name = "qblaschke",
    version,
    about = "Quaternionic Blaschke products: evaluation, zeros, realization, synthesis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Series truncation order.
    #[arg(long, global = true, env = "QBLASCHKE_ORDER", default_value_t = 64)]
    pub order: usize,
    /// Numerical tolerance for zero tests.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for randomized self-checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON file holding the main operand.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Left or right value of a product, polynomial or series at a point.
    Eval {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        point: String,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
    },
    /// Zero reports per conjugacy class.
    Zeros {
        #[command(flatten)]
        source: Source,
        /// Class as `{"re":…,"im_norm":…}` or any member `[w,x,y,z]`.
        #[arg(long)]
        class: Option<String>,
    },
    /// Left and right spherical divisors in one class.
    Divisors {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        class: String,
        /// Element of the class used as representative.
        #[arg(long)]
        representative: Option<String>,
    },
    /// Blaschke product with prescribed zero structure.
    Synth {
        /// Monic polynomial coefficients, constant term first.
        #[arg(long, conflicts_with = "pair")]
        poly: Option<String>,
        /// Controllable pair `{"A": matrix, "v": matrix}`.
        #[arg(long)]
        pair: Option<String>,
    },
    /// Unitary realization of a product.
    Realize {
        #[arg(long)]
        product: Option<String>,
    },
    /// Degree-n recovery from the first n+1 coefficients.
    Recover {
        #[arg(long)]
        prefix: Option<String>,
    },
    /// Contractivity of the Toeplitz section of a prefix.
    SchurTest {
        #[arg(long)]
        prefix: Option<String>,
    },
    /// Least right common multiple of `ρ_α²` and `ρ_β²`.
    Lrcm {
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        beta: Option<String>,
    },
    /// Product with left zeros at pairwise non-similar points.
    Prescribe {
        #[arg(long)]
        points: Option<String>,
    },
}

#[derive(Args, Debug)]
#[group(multiple = false)]
pub struct Source {
    /// Product `{"nodes": […], "phi": q}`.
    #[arg(long)]
    pub product: Option<String>,
    /// Polynomial coefficients, constant term first.
    #[arg(long)]
    pub poly: Option<String>,
    /// Series `{"coeffs": […], "order": N, "tail_ratio": r|null}`.
    #[arg(long)]
    pub series: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

/// Why a job did not produce a result.
#[derive(Debug)]
pub enum Failure {
    Domain(qblaschke::Error),
    Io(String),
    Parse(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Domain(_) => 2,
            Failure::Io(_) | Failure::Parse(_) => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Failure::Domain(e) => json!({ "error": e.name(), "detail": e.to_string() }),
            Failure::Io(d) => json!({ "error": "IoError", "detail": d }),
            Failure::Parse(d) => json!({ "error": "ParseError", "detail": d }),
        }
    }
}

impl From<qblaschke::Error> for Failure {
    fn from(e: qblaschke::Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Function operand of `eval`, `zeros` and `divisors`.
enum Operand {
    Product {
        nodes: Vec<Quaternion>,
        phi: Quaternion,
    },
    Poly(Polynomial),
    Series(QSeries),
}

impl Operand {
    fn product(&self) -> Outcome<BlaschkeProduct> {
        match self {
            Operand::Product { nodes, phi } => Ok(BlaschkeProduct::new(nodes.clone(), *phi)?),
            _ => Err(Failure::Parse("expected a product".into())),
        }
    }
}

fn parse<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Outcome<T> {
    serde_json::from_str(text).map_err(|e| Failure::Parse(format!("{what}: {e}")))
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> Outcome<T> {
    serde_json::from_value(v).map_err(|e| Failure::Parse(format!("{what}: {e}")))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("library types serialize to JSON")
}

fn parse_raw_product(v: Value) -> Outcome<Operand> {
    let obj = v
        .as_object()
        .ok_or_else(|| Failure::Parse("product: expected an object".into()))?;
    let nodes = from_value(
        obj.get("nodes").cloned().unwrap_or(Value::Null),
        "product nodes",
    )?;
    let phi = match obj.get("phi") {
        Some(p) => from_value(p.clone(), "product phi")?,
        None => Quaternion::ONE,
    };
    Ok(Operand::Product { nodes, phi })
}

fn parse_class(text: &str) -> Outcome<ConjugacyClass> {
    let v: Value = parse(text, "class")?;
    if v.is_array() {
        let q: Quaternion = from_value(v, "class")?;
        Ok(q.class())
    } else {
        from_value(v, "class")
    }
}

impl Cli {
    fn read_input(&self) -> Outcome<Option<String>> {
        match &self.input {
            Some(path) => fs::read_to_string(path)
                .map(Some)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
            None => Ok(None),
        }
    }

    /// Inline text, else the `--input` file, else an error naming the flag.
    fn operand_text(&self, inline: &Option<String>, flag: &str) -> Outcome<String> {
        if let Some(t) = inline {
            return Ok(t.clone());
        }
        self.read_input()?
            .ok_or_else(|| Failure::Parse(format!("missing --{flag} (or --input)")))
    }

    fn function(&self, src: &Source) -> Outcome<Operand> {
        if let Some(t) = &src.product {
            return parse_raw_product(parse(t, "product")?);
        }
        if let Some(t) = &src.poly {
            return Ok(Operand::Poly(parse(t, "poly")?));
        }
        if let Some(t) = &src.series {
            return Ok(Operand::Series(parse(t, "series")?));
        }
        let text = self
            .read_input()?
            .ok_or_else(|| Failure::Parse("missing --product, --poly or --series".into()))?;
        let v: Value = parse(&text, "input")?;
        match &v {
            Value::Array(_) => Ok(Operand::Poly(from_value(v, "poly")?)),
            Value::Object(o) if o.contains_key("nodes") => parse_raw_product(v),
            Value::Object(o) if o.contains_key("coeffs") => {
                Ok(Operand::Series(from_value(v, "series")?))
            }
            _ => Err(Failure::Parse(
                "input is not a product, polynomial or series".into(),
            )),
        }
    }

    fn divisor_options(
        &self,
        mode: DivisorMode,
        representative: Option<Quaternion>,
    ) -> DivisorOptions {
        DivisorOptions {
            mode,
            representative,
            tol: self.tol,
            ..DivisorOptions::default()
        }
    }

    fn divisors(
        &self,
        f: &Operand,
        class: ConjugacyClass,
        rep: Option<Quaternion>,
    ) -> Outcome<SphericalDivisors> {
        let d = match f {
            Operand::Product { .. } => {
                let b = f.product()?;
                let order = adaptive_order(b.degree(), b.max_node_modulus());
                spherical_divisors_with(
                    &b.series(order),
                    class,
                    self.divisor_options(DivisorMode::Blaschke, rep),
                )?
            }
            Operand::Poly(p) => {
                let deg = p
                    .degree()
                    .ok_or_else(|| qblaschke::Error::InvalidInput("zero polynomial".into()))?;
                let opts = self.divisor_options(DivisorMode::Polynomial, rep);
                spherical_divisors_with(&p.to_series(2 * deg + 2), class, opts)?
            }
            Operand::Series(s) => spherical_divisors_with(
                s,
                class,
                self.divisor_options(DivisorMode::Polynomial, rep),
            )?,
        };
        Ok(d)
    }

    /// Classes of the zeros of a product or polynomial.
    fn zero_classes(&self, f: &Operand) -> Outcome<Vec<ConjugacyClass>> {
        let classes: Vec<ConjugacyClass> = match f {
            Operand::Product { nodes, .. } => nodes.iter().map(|a| a.class()).collect(),
            Operand::Poly(p) => {
                let n = p.degree().unwrap_or(0);
                if n == 0 {
                    return Ok(Vec::new());
                }
                let lead = p.coeffs()[n].inv()?;
                let monic = Polynomial::new(p.coeffs().iter().map(|c| *c * lead).collect());
                companion_matrix(&monic)?
                    .right_spectrum()?
                    .into_iter()
                    .map(|(c, _)| c)
                    .collect()
            }
            Operand::Series(_) => {
                return Err(qblaschke::Error::InvalidInput(
                    "zeros of a series need --class".into(),
                )
                .into());
            }
        };
        let mut out: Vec<ConjugacyClass> = Vec::new();
        for c in classes {
            if !out.iter().any(|d| d.approx_eq(&c, 1e-8)) {
                out.push(c);
            }
        }
        out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im_norm.total_cmp(&b.im_norm)));
        Ok(out)
    }

    fn self_check(
        &self,
        check: impl Fn(Quaternion, Side) -> Outcome<f64>,
    ) -> Outcome<Option<Value>> {
        let Some(seed) = self.seed else {
            return Ok(None);
        };
        let mut rng = sample::rng(seed);
        let mut worst = 0.0f64;
        for _ in 0..SELF_CHECK_POINTS {
            let g = sample::in_ball(&mut rng, 0.5);
            for side in [Side::Left, Side::Right] {
                worst = worst.max(check(g, side)?);
            }
        }
        Ok(Some(
            json!({ "seed": seed, "points": SELF_CHECK_POINTS, "max_error": worst }),
        ))
    }
}

fn with_check(mut v: Value, check: Option<Value>) -> Value {
    if let (Some(c), Some(obj)) = (check, v.as_object_mut()) {
        obj.insert("self_check".into(), c);
    }
    v
}

/// Executes one job and returns its result document.
pub fn run(cli: &Cli) -> Outcome<Value> {
    match &cli.command {
        Command::Eval {
            source,
            point,
            side,
        } => {
            let f = cli.function(source)?;
            let gamma: Quaternion = parse(point, "point")?;
            let side: Side = (*side).into();
            let (value, err_bound) = match &f {
                Operand::Product { nodes, phi } => {
                    (eval_nodes(nodes, *phi, gamma, side)?, Some(0.0))
                }
                Operand::Poly(p) => {
                    let e = p.evaluate(gamma, side)?;
                    (e.value, e.err_bound)
                }
                Operand::Series(s) => {
                    let e = s.evaluate(gamma, side)?;
                    (e.value, e.err_bound)
                }
            };
            Ok(json!({ "point": gamma, "side": side, "value": value, "err_bound": err_bound }))
        }
        Command::Zeros { source, class } => {
            let f = cli.function(source)?;
            let classes = match class {
                Some(t) => vec![parse_class(t)?],
                None => cli.zero_classes(&f)?,
            };
            let mut reports = Vec::with_capacity(classes.len());
            for c in classes {
                reports.push(to_value(&cli.divisors(&f, c, None)?.report()));
            }
            Ok(Value::Array(reports))
        }
        Command::Divisors {
            source,
            class,
            representative,
        } => {
            let f = cli.function(source)?;
            let class = parse_class(class)?;
            let rep = representative
                .as_deref()
                .map(|t| parse::<Quaternion>(t, "representative"))
                .transpose()?;
            let d = cli.divisors(&f, class, rep)?;
            Ok(json!({
                "report": d.report(),
                "real_multiplicity": d.real_multiplicity,
                "representative": d.representative,
                "left": d.left,
                "right": d.right,
                "residual": d.residual,
            }))
        }
        Command::Synth { poly, pair } => {
            let pair = match (poly, pair) {
                (_, Some(t)) => {
                    let v: Value = parse(t, "pair")?;
                    pair_from_json(v)?
                }
                (Some(t), None) => pair_from_polynomial(&parse(t, "poly")?)?,
                (None, None) => {
                    let text = cli.operand_text(&None, "poly")?;
                    let v: Value = parse(&text, "input")?;
                    if v.is_array() {
                        pair_from_polynomial(&from_value(v, "poly")?)?
                    } else {
                        pair_from_json(v)?
                    }
                }
            };
            let res = synthesize_pair(&pair, cli.order)?;
            let checks = res.checks(&pair)?;
            let theta = &res.theta.realization;
            let long = theta.series(SELF_CHECK_ORDER);
            let check = cli.self_check(|g, side| {
                Ok(theta.eval(g, side)?.dist(long.evaluate(g, side)?.value))
            })?;
            let mut v = to_value(&res);
            if let Some(obj) = v.as_object_mut() {
                obj.insert("checks".into(), to_value(&checks));
            }
            Ok(with_check(v, check))
        }
        Command::Realize { product } => {
            let text = cli.operand_text(product, "product")?;
            let b = parse_raw_product(parse(&text, "product")?)?.product()?;
            let r = build_realization(&b);
            let s = r.series(cli.order);
            let degree = degree_of(&s)?;
            let check =
                cli.self_check(|g, side| Ok(r.eval(g, side)?.dist(product_eval(&b, g, side)?)))?;
            let v = json!({
                "realization": r,
                "degree": degree,
                "unitarity_defect": r.unitarity_defect(),
                "series": s,
            });
            Ok(with_check(v, check))
        }
        Command::Recover { prefix } => {
            let prefix: Vec<Quaternion> = parse(&cli.operand_text(prefix, "prefix")?, "prefix")?;
            let rec = recover(&prefix)?;
            let series = rec.series(cli.order);
            let long = rec.series(SELF_CHECK_ORDER);
            let check = cli.self_check(|g, side| {
                Ok(rec
                    .realization
                    .eval(g, side)?
                    .dist(long.evaluate(g, side)?.value))
            })?;
            let v = json!({
                "degree": rec.degree(),
                "recovery": rec,
                "series": series,
                "identities": rec.identities(),
            });
            Ok(with_check(v, check))
        }
        Command::SchurTest { prefix } => {
            let prefix: Vec<Quaternion> = parse(&cli.operand_text(prefix, "prefix")?, "prefix")?;
            check_schur_prefix(&prefix, cli.tol)?;
            let min_eig = if prefix.is_empty() {
                1.0
            } else {
                defect(&toeplitz(&prefix, prefix.len())).min_eigenvalue()?
            };
            Ok(
                json!({ "schur": true, "min_eigenvalue": min_eig, "rank_profile": rank_profile(&prefix) }),
            )
        }
        Command::Lrcm { alpha, beta } => {
            let (alpha, beta): (Quaternion, Quaternion) = match (alpha, beta) {
                (Some(a), Some(b)) => (parse(a, "alpha")?, parse(b, "beta")?),
                (None, None) => {
                    let v: Value = parse(&cli.operand_text(&None, "alpha")?, "input")?;
                    let get = |k: &str| {
                        from_value::<Quaternion>(v.get(k).cloned().unwrap_or(Value::Null), k)
                    };
                    (get("alpha")?, get("beta")?)
                }
                _ => return Err(Failure::Parse("--alpha and --beta go together".into())),
            };
            let p = lrcm_double(alpha, beta)?;
            let (b1, b2) = lrcm_nodes(alpha, beta)?;
            Ok(json!({ "alpha": alpha, "beta": beta, "beta1": b1, "beta2": b2, "polynomial": p }))
        }
        Command::Prescribe { points } => {
            let points: Vec<Quaternion> = parse(&cli.operand_text(points, "points")?, "points")?;
            let b = prescribed_left_zeros(&points)?;
            let mut residual = 0.0f64;
            for a in &points {
                residual = residual.max(product_eval(&b, *a, Side::Left)?.norm());
            }
            Ok(json!({ "product": b, "residual": residual }))
        }
    }
}

fn pair_from_json(v: Value) -> Outcome<ControllablePair> {
    let get = |k: &str| from_value::<QMatrix>(v.get(k).cloned().unwrap_or(Value::Null), k);
    let a = get("A")?;
    let v = get("v")?;
    Ok(ControllablePair::new(a, v)?)
}

/// Serializes a document the same way on every run.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Parses arguments, runs the job, writes the output and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(v) => {
            let text = render(&v);
            match &cli.output {
                Some(path) => match fs::write(path, text) {
                    Ok(()) => 0,
                    Err(e) => report(&Failure::Io(format!("{}: {e}", path.display()))),
                },
                None => {
                    print!("{text}");
                    0
                }
            }
        }
        Err(f) => report(&f),
    }
}

fn report(f: &Failure) -> i32 {
    print!("{}", render(&f.to_json()));
    f.exit_code()
}
