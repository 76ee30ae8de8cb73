use ctrwkit::expr::parse;
use ctrwkit::io::{read_rows, write_rows};
use ctrwkit::report::{canonical, parse_report};
use ctrwkit_core::stats::{DiagnosticReport, Estimate};
use proptest::prelude::*;

#[derive(Clone, Debug)]
enum Ast {
    Num(f64),
    Var(usize),
    Neg(Box<Ast>),
    Bin(char, Box<Ast>, Box<Ast>),
    Call(&'static str, Vec<Ast>),
}

const VARS: [&str; 3] = ["t", "x", "y"];

impl Ast {
    fn show(&self) -> String {
        match self {
            Ast::Num(v) => format!("{v}"),
            Ast::Var(i) => VARS[*i].to_string(),
            Ast::Neg(a) => format!("(-{})", a.show()),
            Ast::Bin(op, a, b) => format!("({} {op} {})", a.show(), b.show()),
            Ast::Call(f, args) => format!("{f}({})", args.iter().map(Ast::show).collect::<Vec<_>>().join(", ")),
        }
    }

    fn eval(&self, env: &[f64]) -> f64 {
        match self {
            Ast::Num(v) => *v,
            Ast::Var(i) => env[*i],
            Ast::Neg(a) => -a.eval(env),
            Ast::Bin(op, a, b) => {
                let (p, q) = (a.eval(env), b.eval(env));
                match op {
                    '+' => p + q,
                    '-' => p - q,
                    '*' => p * q,
                    '/' => p / q,
                    _ => p.powf(q),
                }
            }
            Ast::Call(f, args) => {
                let v: Vec<f64> = args.iter().map(|a| a.eval(env)).collect();
                match *f {
                    "abs" => v[0].abs(),
                    "exp" => v[0].exp(),
                    "tanh" => v[0].tanh(),
                    "sin" => v[0].sin(),
                    "cos" => v[0].cos(),
                    "min" => v.iter().copied().fold(f64::INFINITY, f64::min),
                    _ => v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                }
            }
        }
    }
}

fn ast() -> impl Strategy<Value = Ast> {
    let leaf = prop_oneof![(0u32..1000).prop_map(|k| Ast::Num(f64::from(k) / 100.0)), (0usize..3).prop_map(Ast::Var)];
    leaf.prop_recursive(5, 40, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Ast::Neg(Box::new(a))),
            (prop::sample::select(vec!['+', '-', '*', '/', '^']), inner.clone(), inner.clone())
                .prop_map(|(op, a, b)| Ast::Bin(op, Box::new(a), Box::new(b))),
            (prop::sample::select(vec!["abs", "exp", "tanh", "sin", "cos"]), inner.clone())
                .prop_map(|(f, a)| Ast::Call(f, vec![a])),
            (prop::sample::select(vec!["min", "max"]), prop::collection::vec(inner, 2..4))
                .prop_map(|(f, a)| Ast::Call(f, a)),
        ]
    })
}

fn same(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn printed_expressions_parse_back(e in ast(), env in prop::array::uniform3(-3.0f64..3.0)) {
        let src = e.show();
        let parsed = parse(&src, &VARS).unwrap();
        prop_assert!(same(parsed.eval(&env), e.eval(&env)), "{} at {:?}: {} vs {}", src, env, parsed.eval(&env), e.eval(&env));
    }

    #[test]
    fn csv_rows_round_trip(steps in prop::collection::vec((1e-6f64..1.0, -1e6f64..1e6), 1..50), v0 in -1e6f64..1e6) {
        let mut t = vec![0.0];
        let mut v = vec![v0];
        for (dt, x) in steps {
            t.push(t[t.len() - 1] + dt);
            v.push(x);
        }
        let mut buf = Vec::new();
        write_rows(&mut buf, &t, &v).unwrap();
        let (t2, v2) = read_rows(buf.as_slice()).unwrap();
        prop_assert_eq!(t2, t);
        prop_assert_eq!(v2, v);
    }

    #[test]
    fn reports_round_trip(vals in prop::collection::vec(-1e9f64..1e9, 1..10), seed in any::<u32>()) {
        let mut r = DiagnosticReport::new("prop", u64::from(seed)).param("k", 3i64).param("x", 0.25);
        for (i, v) in vals.iter().enumerate() {
            r.push(Estimate::exact(format!("e{i}"), *v, 10));
        }
        r.push(Estimate::exact("inf", f64::INFINITY, 1));
        let text = canonical(&r);
        prop_assert_eq!(canonical(&parse_report(&text).unwrap()), text);
    }
}

#[test]
fn unicode_operator_spellings() {
    let a = parse("2 × y − 1 ÷ 4 + y ** 2", &["y"]).unwrap();
    let b = parse("2 * y - 1 / 4 + y ^ 2", &["y"]).unwrap();
    assert_eq!(a.eval(&[1.5]), b.eval(&[1.5]));
    assert_eq!(parse("-2^2", &[]).unwrap().eval(&[]), -4.0);
    assert_eq!(parse("2^3^2", &[]).unwrap().eval(&[]), 512.0);
}
