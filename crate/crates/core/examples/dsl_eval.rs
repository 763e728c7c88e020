//! Parse and evaluate expressions of the scripting language directly.

use datatrace::dsl::{eval_expr, parse_expr, parse_script, Env, Evaluated, BUILTINS};
use datatrace::table::{parse_csv, Value};

fn main() {
    let spm = parse_csv(
        "id,staff,turnover\n\
SPM01,75,NA\n\
SPM02,9,1607\n\
SPM03,NA,6886\n",
    )
    .unwrap();
    let mut env = Env::new();
    env.bind_scalar("Rhat", Value::Number(42.0 / 4246.5));

    for src in [
        "ifelse(is_na(staff), Rhat * turnover, staff)",
        "mean(staff, na_rm = TRUE) / mean(turnover, na_rm = TRUE)",
        "turnover > 2000 | is_na(turnover)",
        "6886 / 6919",
        "staff / 0",
    ] {
        let e = parse_expr(src).unwrap();
        match eval_expr(&e, &env, Some(&spm)).unwrap() {
            Evaluated::Scalar(v) => println!("{e}\n  = {v}"),
            Evaluated::Column(cells) => {
                let shown: Vec<String> = cells.iter().map(ToString::to_string).collect();
                println!("{e}\n  = [{}]", shown.join(", "));
            }
        }
    }

    // Scripts print back in canonical form.
    let script = parse_script("x<-read_csv('a.csv');x<-transform(x,y=(1+2)*z)", "inline").unwrap();
    print!("\ncanonical form:\n{script}");

    println!("\nbuilt-in functions:");
    for (signature, description) in BUILTINS {
        println!("  {signature:<28} {description}");
    }
}
