//! Rule: record fields that are declared but never touched.
//!
//! A field counts as used when any expression creates, updates, reads, or
//! indexes it — `#r{f = V}`, `R#r.f`, `#r.f` — or when a wildcard default
//! `#r{_ = V}` touches the whole record. When the record name itself is
//! hidden behind a macro (`#?MODULE{f = V}`), the field marks that name in
//! *every* record; when a macro stands where the field list should be, the
//! whole record is treated as used. Both degradations only ever suppress
//! warnings.

use std::collections::BTreeSet;

use crate::engine::{IgnorePattern, Rule, RuleId, RuleResult};
use crate::rules::RecordFieldKey;
use crate::scanner::ProjectContext;
use crate::syntax::{query_nodes, NodeKind, NodePayload};
use crate::term::TermValue;

pub struct UnusedRecordFields;

impl Rule for UnusedRecordFields {
    fn id(&self) -> RuleId {
        RuleId::new("unused_record_fields")
    }

    fn analyze(&self, ctx: &ProjectContext) -> Vec<RuleResult> {
        let mut declared: Vec<(String, u32, RecordFieldKey)> = Vec::new();
        let mut used: BTreeSet<RecordFieldKey> = BTreeSet::new();
        let mut whole_record: BTreeSet<String> = BTreeSet::new();
        let mut field_in_any_record: BTreeSet<String> = BTreeSet::new();
        let mut wildcard_in_any_record = false;

        for (entry, forms) in ctx.form_files() {
            for node in query_nodes(forms, NodeKind::RecordAttr) {
                let NodePayload::RecordAttr { name, fields } = &node.payload else {
                    unreachable!()
                };
                for field in fields {
                    declared.push((
                        entry.path.clone(),
                        field.line,
                        RecordFieldKey { record: name.clone(), field: field.name.clone() },
                    ));
                }
            }
            for node in query_nodes(forms, NodeKind::RecordExpr) {
                let NodePayload::RecordExpr { name, fields, wildcard } = &node.payload else {
                    unreachable!()
                };
                match name {
                    Some(record) => {
                        for field in fields {
                            used.insert(RecordFieldKey {
                                record: record.clone(),
                                field: field.clone(),
                            });
                        }
                        if *wildcard {
                            whole_record.insert(record.clone());
                        }
                    }
                    None => {
                        field_in_any_record.extend(fields.iter().cloned());
                        if *wildcard {
                            wildcard_in_any_record = true;
                        }
                    }
                }
            }
            for kind in [NodeKind::RecordAccess, NodeKind::RecordIndex] {
                for node in query_nodes(forms, kind) {
                    let (NodePayload::RecordAccess { name, field }
                    | NodePayload::RecordIndex { name, field }) = &node.payload
                    else {
                        unreachable!()
                    };
                    match name {
                        Some(record) => {
                            used.insert(RecordFieldKey {
                                record: record.clone(),
                                field: field.clone(),
                            });
                        }
                        None => {
                            field_in_any_record.insert(field.clone());
                        }
                    }
                }
            }
        }

        if wildcard_in_any_record {
            // `#?Macro{..., _ = V}` could touch every field of any record.
            return Vec::new();
        }

        declared
            .into_iter()
            .filter(|(_, _, key)| {
                !used.contains(key)
                    && !whole_record.contains(&key.record)
                    && !field_in_any_record.contains(&key.field)
            })
            .map(|(file, line, key)| RuleResult {
                rule: self.id(),
                file,
                line,
                text: format!("field {} in record #{} is unused", key.field, key.record),
                pattern: IgnorePattern::RecordField(key),
            })
            .collect()
    }

    /// Ignore details: `record_name` (every field of it), `{record, field}`,
    /// or `{record, [field, ...]}`.
    fn ignored(&self, pattern: &IgnorePattern, detail: &TermValue) -> bool {
        let IgnorePattern::RecordField(key) = pattern else { return false };
        match detail {
            TermValue::Atom(record) => *record == key.record,
            TermValue::Tuple(parts) => match parts.as_slice() {
                [record, TermValue::Atom(field)] => {
                    record.as_atom() == Some(&key.record) && *field == key.field
                }
                [record, TermValue::List(fields)] => {
                    record.as_atom() == Some(&key.record)
                        && fields.iter().any(|f| f.as_atom() == Some(&key.field))
                }
                _ => false,
            },
            _ => false,
        }
    }
}
