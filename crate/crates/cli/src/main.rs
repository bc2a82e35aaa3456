use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pauli_normalizer::error::Error;
use pauli_normalizer::identities;
use pauli_normalizer::normalizer::{coeff_matrix, grading_action, lift, AutomorphismRep};
use pauli_normalizer::oracle::{closure_bfs, closure_extended, enumerate_by_form, order_formula, SignSet};
use pauli_normalizer::pauli::{GradingIndex, PauliMonomial};
use pauli_normalizer::symplectic::{
    build_d, decompose, decompose_with_sign, is_symplectic, six_residuals, GeneratorWord, Sign,
};
use pauli_normalizer::zmod::{Prime, ZModMatrix};

#[derive(Parser)]
#[command(
    name = "pauli-normalizer",
    version,
    about = "Normalizer of the Pauli grading of sl(p^2, C)"
)]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report whether a 4x4 matrix satisfies X^T J X = J or -J, with the six residuals.
    Check { file: PathBuf },
    /// Write an extended-symplectic matrix as a word in D1..D4 (and OUT).
    Decompose {
        file: PathBuf,
        /// Write the word to this file.
        #[arg(long)]
        emit_word: Option<PathBuf>,
        /// Evaluate the word and compare with the input.
        #[arg(long)]
        verify: bool,
        /// Use the -J coset. Only needed for p = 2 where both cosets coincide.
        #[arg(long)]
        outer: bool,
    },
    /// Lift a word to an explicit p^2 x p^2 automorphism representative.
    Lift {
        word_file: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        out: PathBuf,
        /// Print the coefficient matrix of the result.
        #[arg(long)]
        check: bool,
    },
    /// Coefficient matrix C of an automorphism given as a cyclotomic matrix file.
    Coeff {
        file: PathBuf,
        /// Treat the matrix as the outer automorphism X -> -(B^-1 X B)^T.
        #[arg(long)]
        outer: bool,
    },
    /// Enumerate the group for p in {2, 3} and cross-check it.
    Enumerate {
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value_t = SignArg::Plus)]
        sign: SignArg,
        /// Write every element to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Run the named identity suite for one prime (p <= 11).
    VerifyPaper {
        #[arg(long)]
        p: u64,
    },
    /// Image of a Pauli monomial under an automorphism.
    Act {
        rep_file: PathBuf,
        /// Monomial as "w^a P^i Q^j x P^k Q^l".
        #[arg(long)]
        monomial: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
    Both,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_parse() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

impl Failure {
    fn domain(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure {
        code: 2,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn emit(json: bool, value: Value, human: impl FnOnce() -> String) {
    if json {
        println!("{value}");
    } else {
        print!("{}", human());
    }
}

fn rows(m: &ZModMatrix) -> Vec<Vec<u64>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| m.get(r, c)).collect())
        .collect()
}

fn sign_label(s: Option<Sign>) -> String {
    s.map_or("none".into(), |s| s.to_string())
}

fn check(file: &Path, json: bool) -> Outcome {
    let m = ZModMatrix::parse(&read(file)?)?;
    let sign = is_symplectic(&m)?;
    let residuals = six_residuals(&m)?.map(|r| r.value());
    const NAMES: [&str; 6] = ["I", "II", "III", "IV", "V", "VI"];
    emit(
        json,
        json!({ "p": m.modulus().get(), "sign": sign_label(sign), "residuals": residuals }),
        || {
            let mut s = format!("{}\n", sign_label(sign));
            for (name, r) in NAMES.iter().zip(residuals) {
                s += &format!("({name}) residual {r}\n");
            }
            s
        },
    );
    Ok(())
}

fn decompose_cmd(file: &Path, emit_word: Option<&Path>, verify: bool, outer: bool, json: bool) -> Outcome {
    let m = ZModMatrix::parse(&read(file)?)?;
    let word = if outer {
        decompose_with_sign(&m, Sign::Minus)?
    } else {
        decompose(&m)?
    };
    let text = word.to_string();
    if verify && word.evaluate() != m {
        return Err(Failure::domain(format!("word `{text}` does not evaluate to the input")));
    }
    if let Some(path) = emit_word {
        write(path, &format!("{text}\n"))?;
    }
    emit(
        json,
        json!({ "p": m.modulus().get(), "word": text, "outer": word.is_outer(), "tokens": word.tokens().len(), "verified": verify }),
        || format!("{text}\n"),
    );
    Ok(())
}

fn lift_cmd(word_file: &Path, p: u64, out: &Path, check: bool, json: bool) -> Outcome {
    let p = Prime::new(p)?;
    let word = GeneratorWord::parse(p, &read(word_file)?)?;
    let rep = lift(&word);
    write(out, &rep.to_text())?;
    let c = if check { Some(coeff_matrix(&rep)?) } else { None };
    emit(
        json,
        json!({ "p": p.get(), "word": word.to_string(), "outer": rep.is_outer(), "out": out.display().to_string(), "coeff": c.as_ref().map(rows) }),
        || match &c {
            Some(c) => c.to_text(),
            None => format!("wrote {}\n", out.display()),
        },
    );
    Ok(())
}

fn coeff(file: &Path, outer: bool, json: bool) -> Outcome {
    let mut rep = AutomorphismRep::from_text(&read(file)?)?;
    if outer && !rep.is_outer() {
        rep = AutomorphismRep::new(rep.order(), rep.matrix().clone(), true)?;
    }
    let c = coeff_matrix(&rep)?;
    let sign = is_symplectic(&c)?;
    emit(
        json,
        json!({ "p": c.modulus().get(), "coeff": rows(&c), "sign": sign_label(sign) }),
        || c.to_text(),
    );
    Ok(())
}

fn enumerate(p: u64, sign: SignArg, dump: Option<&Path>, json: bool) -> Outcome {
    let p = Prime::new(p)?;
    let set = match sign {
        SignArg::Plus => SignSet::Plus,
        SignArg::Minus => SignSet::Minus,
        SignArg::Both => SignSet::Both,
    };
    let table = enumerate_by_form(p, set)?;
    let expected = order_formula(p) * if matches!(sign, SignArg::Both) { 2 } else { 1 };
    let closure: HashSet<(Sign, ZModMatrix)> = match sign {
        SignArg::Plus => closure_bfs(&(1..=4).map(|i| build_d(i, p)).collect::<Vec<_>>())?
            .iter()
            .cloned()
            .collect(),
        SignArg::Minus => closure_extended(p)
            .iter()
            .filter(|(s, _)| *s == Sign::Minus)
            .cloned()
            .collect(),
        SignArg::Both => closure_extended(p).iter().cloned().collect(),
    };
    let agrees = closure == table.iter().cloned().collect();
    if table.len() as u128 != expected || !agrees {
        return Err(Failure::domain(format!(
            "enumeration found {}, order formula gives {expected}, closure has {} elements",
            table.len(),
            closure.len()
        )));
    }
    if let Some(path) = dump {
        write(path, &table.dump())?;
    }
    emit(
        json,
        json!({ "p": p.get(), "count": table.len(), "order_formula": expected as u64, "closure_agrees": agrees }),
        || format!("{}\n", table.len()),
    );
    Ok(())
}

fn verify_paper(p: u64, json: bool) -> Outcome {
    let p = Prime::new(p)?;
    let checks = identities::run(p)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    let list: Vec<Value> = checks
        .iter()
        .map(|c| json!({ "name": c.name, "passed": c.passed }))
        .collect();
    emit(json, json!({ "p": p.get(), "checks": list, "failed": failed }), || {
        let mut s = String::new();
        for c in &checks {
            s += &format!("{}  {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name);
        }
        s + &format!("{} of {} identities hold\n", checks.len() - failed, checks.len())
    });
    if failed > 0 {
        return Err(Failure::domain(format!("{failed} identities failed")));
    }
    Ok(())
}

fn act(rep_file: &Path, monomial: &str, json: bool) -> Outcome {
    let rep = AutomorphismRep::from_text(&read(rep_file)?)?;
    let n = rep.order();
    let mono = PauliMonomial::parse(n, monomial)?;
    let image = PauliMonomial::from_matrix(n, &rep.apply(&mono.to_matrix())?)?;
    let e = mono.exponents().map(|x| x as i64);
    if let Ok(v) = GradingIndex::new(n, e) {
        let linear = grading_action(&rep, &v)?;
        if linear.values() != image.exponents() {
            return Err(Failure::domain(format!("image {image} disagrees with C*v = {linear}")));
        }
    }
    emit(
        json,
        json!({ "p": n.get(), "image": image.to_string(), "index": image.exponents() }),
        || format!("{image}\n"),
    );
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let json = cli.json;
    match cli.command {
        Command::Check { file } => check(&file, json),
        Command::Decompose {
            file,
            emit_word,
            verify,
            outer,
        } => decompose_cmd(&file, emit_word.as_deref(), verify, outer, json),
        Command::Lift {
            word_file,
            p,
            out,
            check,
        } => lift_cmd(&word_file, p, &out, check, json),
        Command::Coeff { file, outer } => coeff(&file, outer, json),
        Command::Enumerate { p, sign, dump } => enumerate(p, sign, dump.as_deref(), json),
        Command::VerifyPaper { p } => verify_paper(p, json),
        Command::Act { rep_file, monomial } => act(&rep_file, &monomial, json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if json {
                println!("{}", json!({ "error": f.message, "exit": f.code }));
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
