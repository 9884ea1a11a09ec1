//! Instance file round trip and exact checking of a candidate solution.

use linsep::instance::{parse_rational_vector, Relation};
use linsep::{parse_instance, verify_solution_exact, write_instance};

const TEXT: &str = "3 2\n2 1\n1 3\n-1 4\n# note: kept verbatim\n";

fn main() -> linsep::Result<()> {
    let inst = parse_instance(TEXT)?;
    assert_eq!(write_instance(&inst), TEXT);
    println!("{} x {}, B = {} bits, L = {} bits", inst.m(), inst.n(), inst.bits(), inst.size());

    for candidate in ["1 1", "0 1", "1 -1"] {
        let x = parse_rational_vector(candidate).expect("rationals");
        let v = verify_solution_exact(&inst, &x, Relation::Strict, None)?;
        println!("x = ({candidate}): ok = {:<5} min Ax = {}", v.ok, v.margin);
    }
    Ok(())
}
