//! Recipe XML: the declared list of Application Working Modes.
//!
//! Schema:
//!
//! ```xml
//! <recipe priority="P">
//!   <awm id="I" cores="C" freq_mhz="F" iterations="N" precision="X" time_s="T" energy_j="E"/>
//! </recipe>
//! ```
//!
//! Attributes are exactly as named; AWM document order is preserved. All
//! allocations are validated against the target platform at parse time.

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{Awm, Recipe};
use crate::error::{Error, Result};
use crate::platform::{PlatformSpec, ResourceAllocation};

/// Parse and validate a recipe document.
pub fn parse_recipe(text: &str, platform: &PlatformSpec) -> Result<Recipe> {
    platform.validate()?;
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);

    let mut priority: Option<u32> = None;
    let mut awms: Vec<Awm> = Vec::new();
    let mut in_recipe = false;
    let mut closed = false;

    loop {
        match reader.read_event() {
            Err(e) => return Err(Error::Recipe(format!("malformed XML: {e}"))),
            Ok(Event::Eof) => break,
            Ok(Event::Decl(_)) | Ok(Event::Comment(_)) | Ok(Event::Text(_)) => {}
            Ok(Event::Start(el)) => match el.name().as_ref() {
                b"recipe" if !in_recipe && !closed => {
                    in_recipe = true;
                    priority = Some(parse_recipe_attrs(&el)?);
                }
                b"awm" if in_recipe => {
                    return Err(Error::Recipe("awm elements must be self-closing".into()))
                }
                other => {
                    return Err(Error::Recipe(format!(
                        "unexpected element <{}>",
                        String::from_utf8_lossy(other)
                    )))
                }
            },
            Ok(Event::Empty(el)) => match el.name().as_ref() {
                b"awm" if in_recipe => awms.push(parse_awm(&el)?),
                other => {
                    return Err(Error::Recipe(format!(
                        "unexpected element <{}/>",
                        String::from_utf8_lossy(other)
                    )))
                }
            },
            Ok(Event::End(el)) => match el.name().as_ref() {
                b"recipe" if in_recipe => {
                    in_recipe = false;
                    closed = true;
                }
                other => {
                    return Err(Error::Recipe(format!(
                        "unexpected closing tag </{}>",
                        String::from_utf8_lossy(other)
                    )))
                }
            },
            Ok(ev) => return Err(Error::Recipe(format!("unexpected XML content: {ev:?}"))),
        }
    }

    let priority = priority.ok_or_else(|| Error::Recipe("missing <recipe> element".into()))?;
    if in_recipe {
        return Err(Error::Recipe("unclosed <recipe> element".into()));
    }
    let recipe = Recipe::new(priority, awms)?;
    recipe.validate_against(platform)?;
    Ok(recipe)
}

fn parse_recipe_attrs(el: &BytesStart<'_>) -> Result<u32> {
    let mut priority = None;
    for attr in el.attributes() {
        let attr = attr.map_err(|e| Error::Recipe(format!("bad attribute: {e}")))?;
        match attr.key.as_ref() {
            b"priority" => priority = Some(parse_int(&attr.value, "priority")?),
            other => {
                return Err(Error::Recipe(format!(
                    "unknown recipe attribute '{}'",
                    String::from_utf8_lossy(other)
                )))
            }
        }
    }
    priority.ok_or_else(|| Error::Recipe("recipe is missing the priority attribute".into()))
}

fn parse_awm(el: &BytesStart<'_>) -> Result<Awm> {
    let mut id = None;
    let mut cores = None;
    let mut freq_mhz = None;
    let mut iterations = None;
    let mut precision = None;
    let mut time_s = None;
    let mut energy_j = None;
    for attr in el.attributes() {
        let attr = attr.map_err(|e| Error::Recipe(format!("bad attribute: {e}")))?;
        let value = &attr.value;
        match attr.key.as_ref() {
            b"id" => id = Some(parse_int(value, "id")?),
            b"cores" => cores = Some(parse_int(value, "cores")?),
            b"freq_mhz" => freq_mhz = Some(parse_int(value, "freq_mhz")?),
            b"iterations" => iterations = Some(parse_int(value, "iterations")?),
            b"precision" => precision = Some(parse_real(value, "precision")?),
            b"time_s" => time_s = Some(parse_real(value, "time_s")?),
            b"energy_j" => energy_j = Some(parse_real(value, "energy_j")?),
            other => {
                return Err(Error::Recipe(format!(
                    "unknown awm attribute '{}'",
                    String::from_utf8_lossy(other)
                )))
            }
        }
    }
    Ok(Awm {
        id: required(id, "id")?,
        alloc: ResourceAllocation {
            cores: required(cores, "cores")?,
            freq_mhz: required(freq_mhz, "freq_mhz")?,
        },
        iterations: required(iterations, "iterations")?,
        expected_precision: required(precision, "precision")?,
        expected_time_s: required(time_s, "time_s")?,
        expected_energy_j: required(energy_j, "energy_j")?,
    })
}

fn required<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::Recipe(format!("awm is missing the {name} attribute")))
}

fn parse_int(raw: &[u8], name: &str) -> Result<u32> {
    std::str::from_utf8(raw)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| {
            Error::Recipe(format!(
                "attribute {name}: expected a non-negative integer, got '{}'",
                String::from_utf8_lossy(raw)
            ))
        })
}

fn parse_real(raw: &[u8], name: &str) -> Result<f64> {
    std::str::from_utf8(raw)
        .ok()
        .and_then(|s| s.parse::<f64>().ok())
        .filter(|v| v.is_finite())
        .ok_or_else(|| {
            Error::Recipe(format!(
                "attribute {name}: expected a finite decimal, got '{}'",
                String::from_utf8_lossy(raw)
            ))
        })
}

/// Serialize a recipe to the schema above. Reals use the shortest
/// representation that round-trips, so parse(serialize(r)) == r.
pub fn serialize_recipe(recipe: &Recipe) -> String {
    let mut out = format!("<recipe priority=\"{}\">\n", recipe.priority);
    for awm in &recipe.awms {
        out.push_str(&format!(
            "  <awm id=\"{}\" cores=\"{}\" freq_mhz=\"{}\" iterations=\"{}\" precision=\"{}\" time_s=\"{}\" energy_j=\"{}\"/>\n",
            awm.id,
            awm.alloc.cores,
            awm.alloc.freq_mhz,
            awm.iterations,
            awm.expected_precision,
            awm.expected_time_s,
            awm.expected_energy_j,
        ));
    }
    out.push_str("</recipe>\n");
    out
}
