//! Tabular domain knowledge: ternary attribute tables, decision-tree
//! feature selection by information gain, and per-class prior vectors.
//!
//! The table holds one row per example with values in {-1, 0, +1}
//! (present / undetermined / absent is the usual reading). A greedy binary
//! decision tree scores attributes by the entropy reduction they achieve;
//! the top `a` attributes span the latent space, and each class's prior
//! vector is the normalized mean of its rows restricted to those attributes.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::prototypes::PrototypeSet;
use crate::sphere::{self, UnitVector};

/// Candidate split thresholds for the ternary domain: value <= t goes left.
/// -0.5 separates {-1} from {0, +1}; 0.5 separates {-1, 0} from {+1}.
/// Together they exhaust the order-respecting binary splits.
pub const SPLIT_THRESHOLDS: [f64; 2] = [-0.5, 0.5];

/// Nodes deeper than this become leaves regardless of purity.
pub const MAX_TREE_DEPTH: usize = 20;

/// Per-example ternary attribute rows with class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeTable {
    example_ids: Vec<String>,
    class_labels: Vec<String>,
    values: Vec<Vec<i8>>,
    attribute_names: Vec<String>,
    /// Distinct classes in first-appearance order; fixes every iteration
    /// order that touches classes.
    class_order: Vec<String>,
    class_index: HashMap<String, usize>,
}

impl AttributeTable {
    pub fn new(
        example_ids: Vec<String>,
        class_labels: Vec<String>,
        values: Vec<Vec<i8>>,
        attribute_names: Vec<String>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyTable);
        }
        if attribute_names.is_empty() {
            return Err(Error::InvalidInput("table needs at least one attribute".into()));
        }
        if example_ids.len() != values.len() || class_labels.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "inconsistent table: {} ids, {} classes, {} rows",
                example_ids.len(),
                class_labels.len(),
                values.len()
            )));
        }
        for (r, row) in values.iter().enumerate() {
            if row.len() != attribute_names.len() {
                return Err(Error::Parse {
                    line: r + 2,
                    message: format!(
                        "expected {} values, got {}",
                        attribute_names.len(),
                        row.len()
                    ),
                });
            }
            for v in row {
                if !matches!(v, -1 | 0 | 1) {
                    return Err(Error::Domain {
                        line: r + 2,
                        value: v.to_string(),
                    });
                }
            }
        }
        let mut class_order = Vec::new();
        let mut class_index = HashMap::new();
        for label in &class_labels {
            if !class_index.contains_key(label) {
                class_index.insert(label.clone(), class_order.len());
                class_order.push(label.clone());
            }
        }
        Ok(Self {
            example_ids,
            class_labels,
            values,
            attribute_names,
            class_order,
            class_index,
        })
    }

    /// Parses the comma-separated text format: a `id,class,<attr>...` header
    /// followed by one row per example with values in {-1, 0, 1}.
    pub fn parse(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(line) => line?,
            None => return Err(Error::EmptyTable),
        };
        let columns: Vec<&str> = header.split(',').collect();
        if columns.len() < 3 || columns[0] != "id" || columns[1] != "class" {
            return Err(Error::Parse {
                line: 1,
                message: format!(
                    "expected header `id,class,<attr_1>,...`, got {header:?}"
                ),
            });
        }
        let attribute_names: Vec<String> =
            columns[2..].iter().map(|s| s.to_string()).collect();

        let mut example_ids = Vec::new();
        let mut class_labels = Vec::new();
        let mut values = Vec::new();
        for (offset, line) in lines.enumerate() {
            let line = line?;
            let line_no = offset + 2;
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != attribute_names.len() + 2 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!(
                        "expected {} columns, got {}",
                        attribute_names.len() + 2,
                        fields.len()
                    ),
                });
            }
            if fields[0].is_empty() || fields[1].is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "empty id or class field".into(),
                });
            }
            let mut row = Vec::with_capacity(attribute_names.len());
            for field in &fields[2..] {
                row.push(match *field {
                    "-1" => -1,
                    "0" => 0,
                    "1" => 1,
                    other => {
                        return Err(Error::Domain {
                            line: line_no,
                            value: other.to_string(),
                        })
                    }
                });
            }
            example_ids.push(fields[0].to_string());
            class_labels.push(fields[1].to_string());
            values.push(row);
        }
        if values.is_empty() {
            return Err(Error::EmptyTable);
        }
        Self::new(example_ids, class_labels, values, attribute_names)
    }

    pub fn write(&self, writer: &mut impl Write) -> Result<()> {
        write!(writer, "id,class")?;
        for name in &self.attribute_names {
            write!(writer, ",{name}")?;
        }
        writeln!(writer)?;
        for r in 0..self.num_rows() {
            write!(writer, "{},{}", self.example_ids[r], self.class_labels[r])?;
            for v in &self.values[r] {
                write!(writer, ",{v}")?;
            }
            writeln!(writer)?;
        }
        Ok(())
    }

    pub fn num_rows(&self) -> usize {
        self.values.len()
    }

    pub fn num_attributes(&self) -> usize {
        self.attribute_names.len()
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn example_ids(&self) -> &[String] {
        &self.example_ids
    }

    pub fn class_label(&self, row: usize) -> &str {
        &self.class_labels[row]
    }

    pub fn value(&self, row: usize, attribute: usize) -> i8 {
        self.values[row][attribute]
    }

    /// Distinct classes in first-appearance order.
    pub fn classes(&self) -> &[String] {
        &self.class_order
    }

    pub fn class_position(&self, label: &str) -> Option<usize> {
        self.class_index.get(label).copied()
    }

    pub fn rows_of_class(&self, label: &str) -> Vec<usize> {
        (0..self.num_rows())
            .filter(|&r| self.class_labels[r] == label)
            .collect()
    }

    /// Class counts over `rows`, indexed like [`Self::classes`].
    fn class_counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut counts = vec![0usize; self.class_order.len()];
        for &r in rows {
            counts[self.class_index[&self.class_labels[r]]] += 1;
        }
        counts
    }
}

/// Reads an attribute table from a byte stream.
pub fn load_attribute_table(reader: impl BufRead) -> Result<AttributeTable> {
    AttributeTable::parse(reader)
}

/// Shannon entropy (base 2) of the class label over `rows`. Classes are
/// accumulated in the table's first-appearance order so two computations of
/// the same quantity agree bit for bit.
fn entropy(table: &AttributeTable, rows: &[usize]) -> f64 {
    let counts = table.class_counts(rows);
    let n = rows.len() as f64;
    let mut h = 0.0;
    for &count in &counts {
        if count > 0 {
            let p = count as f64 / n;
            h -= p * p.log2();
        }
    }
    h
}

/// Entropy reduction (bits) from splitting `rows` on `attribute` at
/// `threshold`: value <= threshold goes left, the rest right. Splits that
/// leave a branch empty carry no information and return 0. Tiny negative
/// rounding residue is clamped to 0 so the gain is always non-negative.
pub fn information_gain(
    table: &AttributeTable,
    rows: &[usize],
    attribute: usize,
    threshold: f64,
) -> Result<f64> {
    if rows.is_empty() {
        return Err(Error::EmptyRowSet);
    }
    if attribute >= table.num_attributes() {
        return Err(Error::InvalidTarget {
            requested: attribute,
            available: table.num_attributes(),
        });
    }
    let (left, right) = partition(table, rows, attribute, threshold);
    if left.is_empty() || right.is_empty() {
        return Ok(0.0);
    }
    let n = rows.len() as f64;
    let gain = entropy(table, rows)
        - (left.len() as f64 / n) * entropy(table, &left)
        - (right.len() as f64 / n) * entropy(table, &right);
    Ok(gain.max(0.0))
}

fn partition(
    table: &AttributeTable,
    rows: &[usize],
    attribute: usize,
    threshold: f64,
) -> (Vec<usize>, Vec<usize>) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for &r in rows {
        if (table.value(r, attribute) as f64) <= threshold {
            left.push(r);
        } else {
            right.push(r);
        }
    }
    (left, right)
}

/// A node of the greedy information-gain tree.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf {
        rows: usize,
        /// Majority class of the leaf's rows; ties go to the class that
        /// appears first in the table.
        class: String,
    },
    Split {
        attribute: usize,
        threshold: f64,
        gain: f64,
        /// (rows at this node / rows in the table) * gain; the ledger entry
        /// this split contributes to its attribute's score.
        weighted_gain: f64,
        rows: usize,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub root: TreeNode,
    pub total_rows: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRecord {
    pub attribute: usize,
    pub threshold: f64,
    pub gain: f64,
    pub weighted_gain: f64,
    pub rows: usize,
}

impl DecisionTree {
    /// All split nodes in pre-order.
    pub fn splits(&self) -> Vec<SplitRecord> {
        let mut out = Vec::new();
        collect_splits(&self.root, &mut out);
        out
    }
}

fn collect_splits(node: &TreeNode, out: &mut Vec<SplitRecord>) {
    if let TreeNode::Split {
        attribute,
        threshold,
        gain,
        weighted_gain,
        rows,
        left,
        right,
    } = node
    {
        out.push(SplitRecord {
            attribute: *attribute,
            threshold: *threshold,
            gain: *gain,
            weighted_gain: *weighted_gain,
            rows: *rows,
        });
        collect_splits(left, out);
        collect_splits(right, out);
    }
}

/// Builds the greedy binary tree: each node takes the (attribute, threshold)
/// pair with the largest information gain, breaking ties toward the lower
/// attribute index and then the lower threshold. A node stops splitting when
/// it is class-pure, the best gain is 0, it has fewer than 2 rows, or it
/// sits at depth 20.
pub fn build_decision_tree(table: &AttributeTable) -> Result<DecisionTree> {
    let rows: Vec<usize> = (0..table.num_rows()).collect();
    if rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let root = grow(table, &rows, 0)?;
    Ok(DecisionTree {
        root,
        total_rows: table.num_rows(),
    })
}

fn majority_class(table: &AttributeTable, rows: &[usize]) -> String {
    let counts = table.class_counts(rows);
    let mut best = 0;
    for (idx, &count) in counts.iter().enumerate() {
        if count > counts[best] {
            best = idx;
        }
    }
    table.classes()[best].clone()
}

fn is_pure(table: &AttributeTable, rows: &[usize]) -> bool {
    rows.windows(2)
        .all(|w| table.class_label(w[0]) == table.class_label(w[1]))
}

fn grow(table: &AttributeTable, rows: &[usize], depth: usize) -> Result<TreeNode> {
    if rows.len() < 2 || depth >= MAX_TREE_DEPTH || is_pure(table, rows) {
        return Ok(TreeNode::Leaf {
            rows: rows.len(),
            class: majority_class(table, rows),
        });
    }
    let mut best: Option<(usize, f64, f64)> = None;
    for attribute in 0..table.num_attributes() {
        for threshold in SPLIT_THRESHOLDS {
            let gain = information_gain(table, rows, attribute, threshold)?;
            if best.map_or(true, |(_, _, g)| gain > g) {
                best = Some((attribute, threshold, gain));
            }
        }
    }
    let (attribute, threshold, gain) = best.expect("at least one attribute");
    if gain <= 0.0 {
        return Ok(TreeNode::Leaf {
            rows: rows.len(),
            class: majority_class(table, rows),
        });
    }
    let (left_rows, right_rows) = partition(table, rows, attribute, threshold);
    let weighted_gain = (rows.len() as f64 / table.num_rows() as f64) * gain;
    Ok(TreeNode::Split {
        attribute,
        threshold,
        gain,
        weighted_gain,
        rows: rows.len(),
        left: Box::new(grow(table, &left_rows, depth + 1)?),
        right: Box::new(grow(table, &right_rows, depth + 1)?),
    })
}

/// The `a` attribute indices chosen for the latent space, with the score
/// that ranked each of them.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSelection {
    pub selected: Vec<usize>,
    pub scores: Vec<f64>,
}

impl FeatureSelection {
    pub fn dim(&self) -> usize {
        self.selected.len()
    }

    fn validate_for(&self, table: &AttributeTable) -> Result<()> {
        if self.selected.is_empty() {
            return Err(Error::InvalidTarget {
                requested: 0,
                available: table.num_attributes(),
            });
        }
        for (i, &idx) in self.selected.iter().enumerate() {
            if idx >= table.num_attributes() {
                return Err(Error::InvalidTarget {
                    requested: idx,
                    available: table.num_attributes(),
                });
            }
            if self.selected[..i].contains(&idx) {
                return Err(Error::InvalidInput(format!(
                    "attribute {idx} selected twice"
                )));
            }
        }
        Ok(())
    }
}

/// Ranks every attribute: first the attributes the tree splits on, by their
/// cumulative weighted gain over all splits; then the unused attributes, by
/// their root-level information gain. Ties break toward the lower index.
/// The ranking does not depend on how many attributes are later selected.
pub fn rank_attributes(table: &AttributeTable) -> Result<Vec<(usize, f64)>> {
    let tree = build_decision_tree(table)?;
    let mut cumulative = vec![0.0f64; table.num_attributes()];
    for split in tree.splits() {
        cumulative[split.attribute] += split.weighted_gain;
    }
    let all_rows: Vec<usize> = (0..table.num_rows()).collect();
    let mut used = Vec::new();
    let mut unused = Vec::new();
    for attribute in 0..table.num_attributes() {
        if cumulative[attribute] > 0.0 {
            used.push((attribute, cumulative[attribute]));
        } else {
            let mut root_gain = 0.0f64;
            for threshold in SPLIT_THRESHOLDS {
                let gain = information_gain(table, &all_rows, attribute, threshold)?;
                if gain > root_gain {
                    root_gain = gain;
                }
            }
            unused.push((attribute, root_gain));
        }
    }
    let by_score_then_index = |a: &(usize, f64), b: &(usize, f64)| {
        b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0))
    };
    used.sort_by(by_score_then_index);
    unused.sort_by(by_score_then_index);
    used.extend(unused);
    Ok(used)
}

/// Picks the `target` most informative attributes.
pub fn select_features(table: &AttributeTable, target: usize) -> Result<FeatureSelection> {
    if target == 0 || target > table.num_attributes() {
        return Err(Error::InvalidTarget {
            requested: target,
            available: table.num_attributes(),
        });
    }
    let ranking = rank_attributes(table)?;
    let top = &ranking[..target];
    Ok(FeatureSelection {
        selected: top.iter().map(|(idx, _)| *idx).collect(),
        scores: top.iter().map(|(_, score)| *score).collect(),
    })
}

/// Normalized per-class mean attribute vectors: one unit vector per class.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorVectors {
    classes: Vec<String>,
    vectors: Vec<UnitVector>,
    class_counts: Vec<usize>,
}

impl PriorVectors {
    pub fn new(
        classes: Vec<String>,
        vectors: Vec<UnitVector>,
        class_counts: Vec<usize>,
    ) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::InvalidCount(0));
        }
        if classes.len() != vectors.len() || classes.len() != class_counts.len() {
            return Err(Error::InvalidInput(format!(
                "inconsistent priors: {} classes, {} vectors, {} counts",
                classes.len(),
                vectors.len(),
                class_counts.len()
            )));
        }
        let dim = vectors[0].dim();
        for v in &vectors {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: v.dim(),
                });
            }
        }
        for (i, class) in classes.iter().enumerate() {
            if classes[..i].contains(class) {
                return Err(Error::DuplicateClass(class.clone()));
            }
        }
        Ok(Self {
            classes,
            vectors,
            class_counts,
        })
    }

    /// Reinterprets a fully labeled vector set as priors. Sample counts are
    /// not part of the serialized format, so they come back as 0 (unknown).
    pub fn from_labeled_set(set: &PrototypeSet) -> Result<Self> {
        let mut classes = Vec::with_capacity(set.len());
        for (i, label) in set.labels().iter().enumerate() {
            match label {
                Some(l) => classes.push(l.clone()),
                None => return Err(Error::UnlabeledPrototype(i)),
            }
        }
        let counts = vec![0; set.len()];
        Self::new(classes, set.prototypes().to_vec(), counts)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn vectors(&self) -> &[UnitVector] {
        &self.vectors
    }

    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }
}

/// Averages each class's rows over the selected attributes and normalizes
/// the mean onto the sphere (the normalization absorbs the 1/N_m factor).
/// Classes come out in first-appearance order. A class whose mean cancels
/// to zero is reported by name: it signals attributes that carry no signal
/// for that class.
pub fn class_prior_vectors(
    table: &AttributeTable,
    selection: &FeatureSelection,
) -> Result<PriorVectors> {
    selection.validate_for(table)?;
    let mut classes = Vec::new();
    let mut vectors = Vec::new();
    let mut counts = Vec::new();
    for class in table.classes() {
        let rows = table.rows_of_class(class);
        let mut sum = vec![0.0f64; selection.selected.len()];
        for &r in &rows {
            for (k, &attribute) in selection.selected.iter().enumerate() {
                sum[k] += table.value(r, attribute) as f64;
            }
        }
        let vector = sphere::normalize(&sum).map_err(|e| match e {
            Error::ZeroNorm { .. } => Error::ZeroNorm {
                context: format!("the summed attribute vector of class {class:?}"),
            },
            other => other,
        })?;
        classes.push(class.clone());
        vectors.push(vector);
        counts.push(rows.len());
    }
    PriorVectors::new(classes, vectors, counts)
}
