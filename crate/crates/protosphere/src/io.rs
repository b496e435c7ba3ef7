//! Text file formats shared by the library and the CLI.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), which
//! round-trips f64 exactly and makes determinism byte-testable. Labels and
//! ids must not contain commas; anything else, including spaces, is fine.

use std::io::{BufRead, Write};

use crate::embedding::{EmbeddingModel, LabeledDataset};
use crate::error::{Error, Result};
use crate::fewshot::EvalReport;
use crate::prototypes::PrototypeSet;
use crate::sphere::UnitVector;

/// 17-significant-digit decimal rendering; parses back to the same bits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("expected a float, got {s:?}"),
    })
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse::<usize>().map_err(|_| Error::Parse {
        line,
        message: format!("expected an unsigned integer, got {s:?}"),
    })
}

/// Label marking an unassigned prototype slot.
pub const UNASSIGNED_LABEL: &str = "_";

/// Writes a vector set: `dim=a count=M` header, then one
/// `label,coord_1,...,coord_a` line per vector. `_` means unassigned.
pub fn write_vector_set(writer: &mut impl Write, set: &PrototypeSet) -> Result<()> {
    writeln!(writer, "dim={} count={}", set.dim(), set.len())?;
    for (i, p) in set.prototypes().iter().enumerate() {
        let label = set.label(i).unwrap_or(UNASSIGNED_LABEL);
        write!(writer, "{label}")?;
        for c in p.coords() {
            write!(writer, ",{}", fmt_f64(*c))?;
        }
        writeln!(writer)?;
    }
    Ok(())
}

pub fn read_vector_set(reader: impl BufRead) -> Result<PrototypeSet> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "missing `dim=a count=M` header".into(),
            })
        }
    };
    let mut dim = None;
    let mut count = None;
    for token in header.split_whitespace() {
        if let Some(v) = token.strip_prefix("dim=") {
            dim = Some(parse_usize(v, 1)?);
        } else if let Some(v) = token.strip_prefix("count=") {
            count = Some(parse_usize(v, 1)?);
        }
    }
    let (dim, count) = match (dim, count) {
        (Some(d), Some(c)) => (d, c),
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected `dim=a count=M`, got {header:?}"),
            })
        }
    };

    let mut prototypes = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for (offset, line) in lines.enumerate() {
        let line = line?;
        let line_no = offset + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim + 1 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 1 label and {dim} coordinates"),
            });
        }
        labels.push(if fields[0] == UNASSIGNED_LABEL {
            None
        } else {
            Some(fields[0].to_string())
        });
        let coords = fields[1..]
            .iter()
            .map(|f| parse_f64(f, line_no))
            .collect::<Result<Vec<f64>>>()?;
        prototypes.push(UnitVector::from_coords(coords)?);
    }
    if prototypes.len() != count {
        return Err(Error::Parse {
            line: prototypes.len() + 2,
            message: format!("header says count={count}, found {}", prototypes.len()),
        });
    }
    PrototypeSet::from_parts(prototypes, labels)
}

/// Writes the attribute ranking: `attr_index,attr_name,score` per line,
/// descending score within each tier.
pub fn write_ranking(
    writer: &mut impl Write,
    ranking: &[(usize, f64)],
    attribute_names: &[String],
) -> Result<()> {
    writeln!(writer, "attr_index,attr_name,score")?;
    for (index, score) in ranking {
        writeln!(
            writer,
            "{index},{},{}",
            attribute_names[*index],
            fmt_f64(*score)
        )?;
    }
    Ok(())
}

/// Writes the assignment trace: `class,prototype_index,similarity` in
/// assignment order.
pub fn write_assignment(
    writer: &mut impl Write,
    assignment: &crate::assignment::Assignment,
) -> Result<()> {
    writeln!(writer, "class,prototype_index,similarity")?;
    for pair in &assignment.pairs {
        writeln!(
            writer,
            "{},{},{}",
            pair.class,
            pair.prototype_index,
            fmt_f64(pair.similarity)
        )?;
    }
    Ok(())
}

/// Writes a model checkpoint: `layers=k sizes=s0,s1,...,sk` header, then for
/// each layer its weight matrix row-major (one line per output unit) and one
/// line of biases.
pub fn write_checkpoint(writer: &mut impl Write, model: &EmbeddingModel) -> Result<()> {
    let sizes: Vec<String> = model.layer_sizes().iter().map(|s| s.to_string()).collect();
    writeln!(
        writer,
        "layers={} sizes={}",
        model.layer_sizes().len() - 1,
        sizes.join(",")
    )?;
    for l in 0..model.weights().len() {
        for row in &model.weights()[l] {
            let line: Vec<String> = row.iter().map(|w| fmt_f64(*w)).collect();
            writeln!(writer, "{}", line.join(","))?;
        }
        let biases: Vec<String> = model.biases()[l].iter().map(|b| fmt_f64(*b)).collect();
        writeln!(writer, "{}", biases.join(","))?;
    }
    Ok(())
}

pub fn read_checkpoint(reader: impl BufRead) -> Result<EmbeddingModel> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "missing checkpoint header".into(),
            })
        }
    };
    let mut layers = None;
    let mut sizes: Option<Vec<usize>> = None;
    for token in header.split_whitespace() {
        if let Some(v) = token.strip_prefix("layers=") {
            layers = Some(parse_usize(v, 1)?);
        } else if let Some(v) = token.strip_prefix("sizes=") {
            sizes = Some(
                v.split(',')
                    .map(|s| parse_usize(s, 1))
                    .collect::<Result<Vec<usize>>>()?,
            );
        }
    }
    let (layers, sizes) = match (layers, sizes) {
        (Some(l), Some(s)) => (l, s),
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected `layers=k sizes=s0,...`, got {header:?}"),
            })
        }
    };
    if sizes.len() != layers + 1 {
        return Err(Error::Parse {
            line: 1,
            message: format!("layers={layers} but {} sizes", sizes.len()),
        });
    }

    let mut line_no = 1;
    let mut next_line = move |lines: &mut std::io::Lines<_>| -> Result<(String, usize)> {
        line_no += 1;
        match lines.next() {
            Some(line) => Ok((line?, line_no)),
            None => Err(Error::Parse {
                line: line_no,
                message: "unexpected end of checkpoint".into(),
            }),
        }
    };

    let mut weights = Vec::with_capacity(layers);
    let mut biases = Vec::with_capacity(layers);
    let mut lines = lines;
    for l in 0..layers {
        let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
        let mut layer = Vec::with_capacity(fan_out);
        for _ in 0..fan_out {
            let (line, n) = next_line(&mut lines)?;
            let row = parse_float_row(&line, fan_in, n)?;
            layer.push(row);
        }
        weights.push(layer);
        let (line, n) = next_line(&mut lines)?;
        biases.push(parse_float_row(&line, fan_out, n)?);
    }
    EmbeddingModel::from_parts(sizes, weights, biases)
}

fn parse_float_row(line: &str, expected: usize, line_no: usize) -> Result<Vec<f64>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != expected {
        return Err(Error::Parse {
            line: line_no,
            message: format!("expected {expected} floats, got {}", fields.len()),
        });
    }
    fields.iter().map(|f| parse_f64(f, line_no)).collect()
}

/// Writes a feature dataset: `id,class,f_1,...,f_V` header and one row per
/// example.
pub fn write_dataset(writer: &mut impl Write, data: &LabeledDataset) -> Result<()> {
    write!(writer, "id,class")?;
    for j in 1..=data.input_dim() {
        write!(writer, ",f_{j}")?;
    }
    writeln!(writer)?;
    for row in 0..data.len() {
        write!(writer, "{},{}", data.ids()[row], data.label(row))?;
        for x in data.input(row) {
            write!(writer, ",{}", fmt_f64(*x))?;
        }
        writeln!(writer)?;
    }
    Ok(())
}

pub fn read_dataset(reader: impl BufRead) -> Result<LabeledDataset> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(Error::EmptyTable),
    };
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 3 || columns[0] != "id" || columns[1] != "class" {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `id,class,f_1,...`, got {header:?}"),
        });
    }
    let dim = columns.len() - 2;
    let mut ids = Vec::new();
    let mut inputs = Vec::new();
    let mut labels = Vec::new();
    for (offset, line) in lines.enumerate() {
        let line = line?;
        let line_no = offset + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim + 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} columns, got {}", dim + 2, fields.len()),
            });
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "empty id or class field".into(),
            });
        }
        ids.push(fields[0].to_string());
        labels.push(fields[1].to_string());
        inputs.push(
            fields[2..]
                .iter()
                .map(|f| parse_f64(f, line_no))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    if inputs.is_empty() {
        return Err(Error::EmptyTable);
    }
    LabeledDataset::new(ids, inputs, labels)
}

/// Human-readable key: value report.
pub fn write_report_text(writer: &mut impl Write, report: &EvalReport) -> Result<()> {
    let p = &report.protocol;
    writeln!(writer, "way: {}", p.way)?;
    writeln!(writer, "shot: {}", p.shot)?;
    writeln!(writer, "query_count: {}", p.query_count)?;
    writeln!(writer, "episodes_per_seed: {}", p.episodes_per_seed)?;
    let seeds: Vec<String> = p.seeds.iter().map(|s| s.to_string()).collect();
    writeln!(writer, "seeds: {}", seeds.join(","))?;
    writeln!(writer, "episodes: {}", report.episodes)?;
    for (seed, acc) in p.seeds.iter().zip(&report.per_seed_accuracies) {
        writeln!(writer, "seed_accuracy[{seed}]: {}", fmt_f64(*acc))?;
    }
    writeln!(writer, "mean_accuracy: {}", fmt_f64(report.mean_accuracy))?;
    writeln!(writer, "std_error: {}", fmt_f64(report.std_error))?;
    Ok(())
}

/// Machine-readable one-record CSV: protocol, per-seed accuracies, mean,
/// standard error. List cells use `;` separators.
pub fn write_report_csv(writer: &mut impl Write, report: &EvalReport) -> Result<()> {
    writeln!(
        writer,
        "way,shot,query_count,episodes_per_seed,seeds,per_seed_accuracies,mean_accuracy,std_error"
    )?;
    let p = &report.protocol;
    let seeds: Vec<String> = p.seeds.iter().map(|s| s.to_string()).collect();
    let accs: Vec<String> = report
        .per_seed_accuracies
        .iter()
        .map(|a| fmt_f64(*a))
        .collect();
    writeln!(
        writer,
        "{},{},{},{},{},{},{},{}",
        p.way,
        p.shot,
        p.query_count,
        p.episodes_per_seed,
        seeds.join(";"),
        accs.join(";"),
        fmt_f64(report.mean_accuracy),
        fmt_f64(report.std_error)
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prototypes::init_prototypes;
    use crate::sphere::normalize;
    use std::io::Cursor;

    #[test]
    fn fmt_f64_round_trips_exactly() {
        for x in [
            0.6,
            -1.0 / 3.0,
            1.7320508075688772,
            1e-300,
            -4.9406564584124654e-324,
            0.0,
        ] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn vector_set_round_trips() {
        let mut set = init_prototypes(4, 3, 5).unwrap();
        set.set_labels(vec![
            "a".into(),
            "b with spaces".into(),
            "c".into(),
            "d".into(),
        ])
        .unwrap();
        let mut buffer = Vec::new();
        write_vector_set(&mut buffer, &set).unwrap();
        let back = read_vector_set(Cursor::new(&buffer)).unwrap();
        assert_eq!(set, back);
    }

    #[test]
    fn unlabeled_vector_set_round_trips() {
        let set = init_prototypes(3, 4, 8).unwrap();
        let mut buffer = Vec::new();
        write_vector_set(&mut buffer, &set).unwrap();
        let text = String::from_utf8(buffer.clone()).unwrap();
        assert!(text.starts_with("dim=4 count=3\n_,"));
        let back = read_vector_set(Cursor::new(&buffer)).unwrap();
        assert_eq!(set, back);
    }

    #[test]
    fn vector_set_rejects_bad_header() {
        let err = read_vector_set(Cursor::new(b"hello\n")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn checkpoint_round_trips() {
        let model = crate::embedding::EmbeddingModel::new(&[5, 7, 3], 21).unwrap();
        let mut buffer = Vec::new();
        write_checkpoint(&mut buffer, &model).unwrap();
        let back = read_checkpoint(Cursor::new(&buffer)).unwrap();
        assert_eq!(model, back);
    }

    #[test]
    fn checkpoint_rejects_truncation() {
        let model = crate::embedding::EmbeddingModel::new(&[3, 2], 0).unwrap();
        let mut buffer = Vec::new();
        write_checkpoint(&mut buffer, &model).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let truncated: String = text.lines().take(2).collect::<Vec<_>>().join("\n");
        assert!(matches!(
            read_checkpoint(Cursor::new(truncated.as_bytes())),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn dataset_round_trips() {
        let data = crate::embedding::LabeledDataset::new(
            vec!["x1".into(), "x2".into()],
            vec![vec![0.25, -1.5, 3.0], vec![1.0 / 3.0, 0.0, -0.125]],
            vec!["alpha".into(), "beta".into()],
        )
        .unwrap();
        let mut buffer = Vec::new();
        write_dataset(&mut buffer, &data).unwrap();
        let back = read_dataset(Cursor::new(&buffer)).unwrap();
        assert_eq!(data, back);
    }

    #[test]
    fn report_serialization_has_expected_lines() {
        let report = EvalReport {
            protocol: crate::fewshot::EvalProtocol {
                way: 5,
                shot: 1,
                query_count: 15,
                episodes_per_seed: 10,
                seeds: vec![1, 2],
            },
            episodes: 20,
            per_seed_accuracies: vec![0.5, 0.75],
            mean_accuracy: 0.625,
            std_error: 0.01,
        };
        let mut text = Vec::new();
        write_report_text(&mut text, &report).unwrap();
        let text = String::from_utf8(text).unwrap();
        assert!(text.contains("way: 5"));
        assert!(text.contains("seed_accuracy[2]: 7.5"));
        let mut csv = Vec::new();
        write_report_csv(&mut csv, &report).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.contains("1;2"));
    }

    #[test]
    fn assignment_file_lists_pairs_in_order() {
        let assignment = crate::assignment::Assignment {
            pairs: vec![
                crate::assignment::AssignmentPair {
                    class: "a".into(),
                    prototype_index: 2,
                    similarity: 0.9,
                },
                crate::assignment::AssignmentPair {
                    class: "b".into(),
                    prototype_index: 0,
                    similarity: 0.4,
                },
            ],
            mode: crate::assignment::AssignmentMode::Matched,
        };
        let mut buffer = Vec::new();
        write_assignment(&mut buffer, &assignment).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "class,prototype_index,similarity");
        assert!(lines[1].starts_with("a,2,"));
        assert!(lines[2].starts_with("b,0,"));
    }

    #[test]
    fn ranking_file_uses_attribute_names() {
        let ranking = vec![(1usize, 0.75), (0usize, 0.5)];
        let names = vec!["first".to_string(), "second".to_string()];
        let mut buffer = Vec::new();
        write_ranking(&mut buffer, &ranking, &names).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        assert!(text.contains("1,second,"));
        assert!(text.contains("0,first,"));
    }

    #[test]
    fn read_vector_set_accepts_handwritten_floats() {
        let text = "dim=2 count=2\nup,0,1\n_,1,0\n";
        let set = read_vector_set(Cursor::new(text.as_bytes())).unwrap();
        assert_eq!(set.label(0), Some("up"));
        assert_eq!(set.label(1), None);
        assert_eq!(set.prototypes()[0], normalize(&[0.0, 1.0]).unwrap());
    }
}
