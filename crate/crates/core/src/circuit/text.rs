//! Line-oriented circuit serialization, for replay and debugging.
//!
//! Grammar (one token group per line, `#` starts a comment):
//!
//! ```text
//! file     := "qacirc 1" header* "begin" line* "end"
//! header   := ("model" | "qubits" | "system" | "steps" | "boundary") SP value
//! line     := "layer" SP time
//!           | time SP kind (SP site)+ (SP angle){0 or 3} (SP outcome)?
//! kind     := "CNOT_L" | "CNOT_R" | "CZ" | "SWAP" | "H" | "RZ" | "M"
//! ```
//!
//! Each `layer` line opens a new layer at the given time step; gate lines
//! repeat the time for greppability. `M` lines carry the recorded outcome
//! (0 or 1). Angles use Rust's shortest round-trip float formatting, so
//! parsing reproduces the circuit bit-exactly.

use super::*;
use std::fmt::Write as _;

pub fn write_circuit(c: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("qacirc 1\n");
    let _ = writeln!(out, "model {}", c.model.tag());
    let _ = writeln!(out, "qubits {}", c.n_qubits);
    let _ = writeln!(out, "system {}", c.system);
    let _ = writeln!(out, "steps {}", c.steps);
    let _ = writeln!(out, "boundary {}", c.boundary);
    out.push_str("begin\n");
    for (li, layer) in c.layers.iter().enumerate() {
        let _ = writeln!(out, "layer {}", layer.time);
        let mut events = c.events_for_layer(li).iter();
        for gate in &layer.gates {
            let t = layer.time;
            match gate {
                Gate::CnotL(a, b) => _ = writeln!(out, "{t} CNOT_L {a} {b}"),
                Gate::CnotR(a, b) => _ = writeln!(out, "{t} CNOT_R {a} {b}"),
                Gate::Cz(a, b) => _ = writeln!(out, "{t} CZ {a} {b}"),
                Gate::Swap(a, b) => _ = writeln!(out, "{t} SWAP {a} {b}"),
                Gate::H(a) => _ = writeln!(out, "{t} H {a}"),
                Gate::Rz(a, b, th) => {
                    _ = writeln!(out, "{t} RZ {a} {b} {} {} {}", th[0], th[1], th[2])
                }
                Gate::Measure(site) => {
                    let ev = events.next().expect("event per measure gate");
                    _ = writeln!(out, "{t} M {site} {}", u8::from(ev.outcome));
                }
            }
        }
    }
    out.push_str("end\n");
    out
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let err = |line: usize, msg: &str| Error::Parse { line: line + 1, msg: msg.to_string() };
    let mut model = None;
    let mut qubits = None;
    let mut system = None;
    let mut steps = None;
    let mut boundary = None;
    let mut layers: Vec<Layer> = Vec::new();
    let mut events: Vec<MeasurementEvent> = Vec::new();
    let mut in_body = false;
    let mut saw_magic = false;
    let mut done = false;

    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if done {
            return Err(err(ln, "content after end"));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if !saw_magic {
            if toks != ["qacirc", "1"] {
                return Err(err(ln, "expected `qacirc 1` magic"));
            }
            saw_magic = true;
            continue;
        }
        if !in_body {
            match toks[0] {
                "model" => {
                    model = Some(
                        Model::from_tag(toks.get(1).copied().unwrap_or(""))
                            .ok_or_else(|| err(ln, "unknown model"))?,
                    )
                }
                "qubits" => qubits = Some(parse_num(&toks, 1, ln)?),
                "system" => system = Some(parse_num(&toks, 1, ln)?),
                "steps" => steps = Some(parse_num(&toks, 1, ln)?),
                "boundary" => {
                    boundary = Some(match toks.get(1).copied() {
                        Some("periodic") => Boundary::Periodic,
                        Some("open") => Boundary::Open,
                        _ => return Err(err(ln, "boundary must be periodic|open")),
                    })
                }
                "begin" => in_body = true,
                _ => return Err(err(ln, "unknown header key")),
            }
            continue;
        }
        match toks[0] {
            "end" => done = true,
            "layer" => {
                layers.push(Layer { time: parse_num(&toks, 1, ln)?, gates: Vec::new() })
            }
            _ => {
                let time: u32 = parse_num(&toks, 0, ln)?;
                let layer_index = layers.len().checked_sub(1).ok_or_else(|| err(ln, "gate before layer"))?;
                let layer = &mut layers[layer_index];
                if layer.time != time {
                    return Err(err(ln, "gate time disagrees with its layer"));
                }
                let kind = toks.get(1).copied().unwrap_or("");
                let gate = match kind {
                    "CNOT_L" => Gate::CnotL(parse_num(&toks, 2, ln)?, parse_num(&toks, 3, ln)?),
                    "CNOT_R" => Gate::CnotR(parse_num(&toks, 2, ln)?, parse_num(&toks, 3, ln)?),
                    "CZ" => Gate::Cz(parse_num(&toks, 2, ln)?, parse_num(&toks, 3, ln)?),
                    "SWAP" => Gate::Swap(parse_num(&toks, 2, ln)?, parse_num(&toks, 3, ln)?),
                    "H" => Gate::H(parse_num(&toks, 2, ln)?),
                    "RZ" => Gate::Rz(
                        parse_num(&toks, 2, ln)?,
                        parse_num(&toks, 3, ln)?,
                        [
                            parse_float(&toks, 4, ln)?,
                            parse_float(&toks, 5, ln)?,
                            parse_float(&toks, 6, ln)?,
                        ],
                    ),
                    "M" => {
                        let site: u32 = parse_num(&toks, 2, ln)?;
                        let outcome: u8 = parse_num(&toks, 3, ln)?;
                        if outcome > 1 {
                            return Err(err(ln, "outcome must be 0 or 1"));
                        }
                        events.push(MeasurementEvent {
                            layer: layer_index as u32,
                            site,
                            outcome: outcome == 1,
                        });
                        Gate::Measure(site)
                    }
                    _ => return Err(err(ln, "unknown gate kind")),
                };
                layer.gates.push(gate);
            }
        }
    }
    if !done {
        return Err(err(text.lines().count(), "missing end"));
    }
    let circuit = Circuit {
        n_qubits: qubits.ok_or_else(|| err(0, "missing qubits header"))?,
        system: system.ok_or_else(|| err(0, "missing system header"))?,
        steps: steps.ok_or_else(|| err(0, "missing steps header"))?,
        layers,
        measurement_events: events,
        model: model.ok_or_else(|| err(0, "missing model header"))?,
        boundary: boundary.ok_or_else(|| err(0, "missing boundary header"))?,
    };
    circuit.validate()?;
    Ok(circuit)
}

fn parse_num<T: std::str::FromStr>(toks: &[&str], i: usize, ln: usize) -> Result<T> {
    toks.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse { line: ln + 1, msg: format!("bad or missing field {i}") })
}

fn parse_float(toks: &[&str], i: usize, ln: usize) -> Result<f64> {
    parse_num(toks, i, ln)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::generate_circuit;

    #[test]
    fn roundtrip_all_models() {
        for model in [
            Model::QaPurification,
            Model::QaCliffordEntanglement,
            Model::QaNonClifford,
            Model::NonQaClifford,
            Model::NonQaPurification,
        ] {
            let spec = CircuitSpec {
                model,
                length: 6,
                steps: 7,
                rate: 0.3,
                boundary: Boundary::Periodic,
                master_seed: 5,
                trajectory: 2,
            };
            let c = generate_circuit(&spec).unwrap();
            let text = write_circuit(&c);
            let back = parse_circuit(&text).unwrap();
            assert_eq!(c, back, "roundtrip failed for {model}");
        }
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_circuit("nonsense").is_err());
        let missing_end = "qacirc 1\nmodel qa_purification\nqubits 4\nsystem 2\nsteps 0\nboundary open\nbegin\n";
        assert!(parse_circuit(missing_end).is_err());
    }
}
