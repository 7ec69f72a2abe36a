use qwire::backend::{simulate, SimJob};
use qwire::gates::{cx, h};
use qwire::{Circuit, CircuitElement};

fn main() -> Result<(), qwire::Error> {
    let mut c = Circuit::new(2, 0)?;
    c.append(h(0))?.append(cx(0, 1))?;
    c.append(CircuitElement::measure_all(2))?;
    let result = simulate(&SimJob::new(c, 1000).seed(7))?;
    println!("{:?}", result.counts);
    Ok(())
}
