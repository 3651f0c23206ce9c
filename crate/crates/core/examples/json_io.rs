//! Reading and writing operator documents.
//!
//! cargo run --example json_io

use projpair::io::{operator_from_json, operator_to_json, projection_from_json, OperatorInput};
use projpair::operators::TailedOperator;

fn main() -> projpair::Result<()> {
    let p = projection_from_json(include_str!("data/p_shifted.json"))?;
    println!("{p:?}");

    let s = TailedOperator::shift(-1);
    let text = operator_to_json(&s);
    println!("{text}");
    if let OperatorInput::Tailed(back) = operator_from_json(&text)? {
        println!("shift survives: {}", back.shift_offset());
    }

    let bad = r#"{"kind":"tailed","block":[[[1,0]]],"tail":{"constant":2}}"#;
    println!("{}", projection_from_json(bad).unwrap_err());
    Ok(())
}
