//! Report assembly: group file -> closure -> classes -> stratification ->
//! cohomology tables, with JSON (canonical) and markdown (derived) renderers.

use serde::Serialize;

use crate::assembly::{
    boundary_betti, chi_l2, end_l2, end_l2_weighted, sp2_l2, su3_l2, EndGeometry, TableSource,
};
use crate::error::{QaleError, Result};
use crate::group::{close_group, conjugacy_classes, ClassDatum, GroupData};
use crate::groupfile::GroupFile;
use crate::homology::mv_check_su3;
use crate::mckay::{crepant_betti, CohomTable};
use crate::strata::{
    stratification_report, validate_hypotheses, Finding, SpStatus, StratificationReport,
};

/// Everything derived from one group file, ready for report rendering.
#[derive(Debug, Clone)]
pub struct GroupAnalysis {
    pub file: GroupFile,
    pub group: GroupData,
    pub classes: Vec<ClassDatum>,
    pub report: StratificationReport,
    pub findings: Vec<Finding>,
}

impl GroupAnalysis {
    pub fn hypotheses_ok(&self) -> bool {
        // Sp indeterminacy is not a failure by itself; it only blocks sp2
        self.findings.iter().all(|f| f.ok || f.check == "Sp")
    }
}

/// Close the group and compute classes, stratification and findings.
pub fn analyze(file: GroupFile, max_order: usize) -> Result<GroupAnalysis> {
    let group = close_group(&file.generators, max_order)?;
    if group.n() != file.dimension {
        return Err(QaleError::DimensionMismatch(format!(
            "file declares dimension {}, generators act on C^{}",
            file.dimension,
            group.n()
        )));
    }
    let classes = conjugacy_classes(&group)?;
    let report = stratification_report(&group)?;
    let findings = validate_hypotheses(&group, &report);
    Ok(GroupAnalysis {
        file,
        group,
        classes,
        report,
        findings,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassRow {
    pub rep_index: usize,
    pub size: usize,
    pub order: usize,
    pub age: usize,
    pub fixed_dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StratumRow {
    pub dim: usize,
    pub codim: usize,
    pub a_order: usize,
    pub b_order: usize,
    pub orbit: usize,
}

/// The `analyze` report: group order, class table, strata and validation.
#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub name: String,
    pub dimension: usize,
    pub cyclotomic_order: usize,
    pub group_order: usize,
    pub classes: Vec<ClassRow>,
    pub strata: Vec<StratumRow>,
    pub orbit_count: usize,
    pub length: usize,
    pub isolated: bool,
    pub ale_case: bool,
    pub sp_status: SpStatus,
    pub findings: Vec<Finding>,
}

pub fn analyze_report(a: &GroupAnalysis) -> AnalyzeReport {
    AnalyzeReport {
        name: a.file.name.clone(),
        dimension: a.group.n(),
        cyclotomic_order: a.group.order_m(),
        group_order: a.group.len(),
        classes: a
            .classes
            .iter()
            .map(|c| ClassRow {
                rep_index: c.rep_index,
                size: c.member_indices.len(),
                order: c.order,
                age: c.age,
                fixed_dim: c.fixed_dim,
            })
            .collect(),
        strata: a
            .report
            .strata
            .iter()
            .map(|s| StratumRow {
                dim: s.n_i,
                codim: s.m_i,
                a_order: s.a_indices.len(),
                b_order: s.b_coset_reps.len(),
                orbit: s.orbit_id,
            })
            .collect(),
        orbit_count: a.report.orbits.len(),
        length: a.report.length,
        isolated: a.report.isolated,
        ale_case: a.report.strata.is_empty(),
        sp_status: a.report.sp_status,
        findings: a.findings.clone(),
    }
}

/// Which crepant L2 model a cohomology run used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Auto,
    Su3,
    Sp2,
    Ends,
}

impl std::str::FromStr for Model {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Model::Auto),
            "su3" => Ok(Model::Su3),
            "sp2" => Ok(Model::Sp2),
            "ends" => Ok(Model::Ends),
            other => Err(format!("unknown model '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitProvenance {
    pub orbit: usize,
    pub n_i: usize,
    pub m_i: usize,
    pub source: String,
    pub invariant_table: CohomTable,
    /// present when the invariant table was overridden
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heuristic_table: Option<CohomTable>,
    pub plain_table: CohomTable,
}

/// The `cohomology` report.
#[derive(Debug, Clone, Serialize)]
pub struct CohomologyReport {
    pub name: String,
    pub model: Model,
    pub group_order: usize,
    pub dimension: usize,
    pub crepant_betti: CohomTable,
    pub end_l2: CohomTable,
    pub end_l2_weighted: CohomTable,
    pub boundary_betti: CohomTable,
    /// the X-level L2 table; absent in the general-ends mode
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l2_table: Option<CohomTable>,
    pub chi_l2: u64,
    /// Mayer-Vietoris dimension feasibility (SU(3) sequence); None when not
    /// applicable
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mv_ok: Option<bool>,
    pub orbits: Vec<OrbitProvenance>,
    pub caveats: Vec<String>,
}

/// Evaluate the cohomology pipeline under the chosen model.
pub fn cohomology_report(a: &GroupAnalysis, model: Model) -> Result<CohomologyReport> {
    let n = a.group.n();
    let resolved = match model {
        Model::Auto => {
            if n == 3 {
                Model::Su3
            } else if n == 4
                && (a.report.sp_status == SpStatus::Yes || a.file.force_sp)
                && a.report.isolated
            {
                Model::Sp2
            } else {
                Model::Ends
            }
        }
        m => m,
    };
    let ends = EndGeometry::from_stratification(&a.group, &a.report, &a.file.overrides)?;
    let crepant = crepant_betti(&a.classes, n);
    let end_table = end_l2(&ends)?;
    let weighted = end_l2_weighted(&ends)?;
    let boundary = boundary_betti(&ends)?;
    let l2_table = match resolved {
        Model::Su3 => Some(su3_l2(&a.classes, &a.report, n)?),
        Model::Sp2 => Some(sp2_l2(&a.classes, &a.report, n, a.file.force_sp)?),
        Model::Ends => None,
        Model::Auto => unreachable!("auto is resolved above"),
    };
    let chi = chi_l2(&a.classes);
    let mv_ok = if n == 3 {
        Some(mv_check_su3(&a.group, &a.report)?)
    } else {
        None
    };
    let mut caveats =
        vec!["boundary of the compact core assumed connected (dims[0] = 1)".to_string()];
    if n >= 4 {
        caveats.push(
            "existence of a crepant resolution is assumed, not decided, for n >= 4".to_string(),
        );
    }
    if resolved == Model::Ends {
        caveats.push(format!(
            "no crepant L2 theorem is implemented at n = {n}; only end and boundary tables are reported"
        ));
    }
    if resolved == Model::Sp2 {
        caveats.push(
            "the degree-4 dimension counts every age-2 class, including swap-type classes of \
             product-with-swap groups; supply an override to use an externally computed value"
                .to_string(),
        );
    }
    if ends
        .orbits
        .iter()
        .any(|o| matches!(o.source, TableSource::Heuristic))
    {
        caveats.push(
            "invariant tables use the B-orbit counting heuristic unless overridden".to_string(),
        );
    }
    let orbits = ends
        .orbits
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let (source, heuristic_table) = match &o.source {
                TableSource::Heuristic => ("heuristic".to_string(), None),
                TableSource::Override { heuristic } => {
                    ("override".to_string(), Some(heuristic.clone()))
                }
            };
            OrbitProvenance {
                orbit: i,
                n_i: o.n_i,
                m_i: o.m_i,
                source,
                invariant_table: o.invariant_table.clone(),
                heuristic_table,
                plain_table: o.plain_table.clone(),
            }
        })
        .collect();
    Ok(CohomologyReport {
        name: a.file.name.clone(),
        model: resolved,
        group_order: a.group.len(),
        dimension: n,
        crepant_betti: crepant,
        end_l2: end_table,
        end_l2_weighted: weighted,
        boundary_betti: boundary,
        l2_table,
        chi_l2: chi,
        mv_ok,
        orbits,
        caveats,
    })
}

/// Canonical JSON rendering: serialized through `serde_json::Value` so keys
/// come out sorted, which makes re-parsing and re-rendering byte-identical.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report serialization cannot fail");
    serde_json::to_string_pretty(&v).expect("value rendering cannot fail")
}

fn table_line(out: &mut String, label: &str, t: &CohomTable) {
    out.push_str(&format!("| {label} | {t} |\n"));
}

/// Markdown rendering, derived from the same data as the JSON.
pub fn analyze_markdown(r: &AnalyzeReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("# Analysis: {}\n\n", r.name));
    out.push_str(&format!(
        "Group of order {} in SU({}), over Q(zeta_{}).\n\n",
        r.group_order, r.dimension, r.cyclotomic_order
    ));
    out.push_str(
        "## Conjugacy classes\n\n| rep | size | order | age | fixed dim |\n|---|---|---|---|---|\n",
    );
    for c in &r.classes {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} |\n",
            c.rep_index, c.size, c.order, c.age, c.fixed_dim
        ));
    }
    out.push_str("\n## Strata\n\n");
    if r.strata.is_empty() {
        out.push_str("No proper strata: the action is free away from the origin (ALE case).\n");
    } else {
        out.push_str("| dim | codim | |A| | |B| | orbit |\n|---|---|---|---|---|\n");
        for s in &r.strata {
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} |\n",
                s.dim, s.codim, s.a_order, s.b_order, s.orbit
            ));
        }
    }
    out.push_str(&format!(
        "\nOrbits: {} . Length: {} . Isolated: {} . Sp status: {}\n",
        r.orbit_count, r.length, r.isolated, r.sp_status
    ));
    out.push_str("\n## Validation\n\n");
    for f in &r.findings {
        out.push_str(&format!(
            "- {}: {} ({})\n",
            f.check,
            if f.ok { "OK" } else { "FAIL" },
            f.detail
        ));
    }
    out
}

pub fn cohomology_markdown(r: &CohomologyReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("# Cohomology: {}\n\n", r.name));
    out.push_str(&format!(
        "Model: {:?} . Group order: {} . n = {}\n\n",
        r.model, r.group_order, r.dimension
    ));
    out.push_str("| table | dims |\n|---|---|\n");
    table_line(&mut out, "H^*(X) (crepant)", &r.crepant_betti);
    table_line(&mut out, "L2 H^*(O)", &r.end_l2);
    table_line(&mut out, "L2_w H^*(O)", &r.end_l2_weighted);
    table_line(&mut out, "H^*(dK)", &r.boundary_betti);
    if let Some(t) = &r.l2_table {
        table_line(&mut out, "L2 H^*(X)", t);
    }
    out.push_str(&format!("\nchi_L2 = {}\n", r.chi_l2));
    if let Some(mv) = r.mv_ok {
        out.push_str(&format!(
            "Mayer-Vietoris feasibility: {}\n",
            if mv { "OK" } else { "FAIL" }
        ));
    }
    out.push_str("\n## Orbit tables\n\n");
    for o in &r.orbits {
        out.push_str(&format!(
            "- orbit {} (n_i = {}, m_i = {}): invariant {} [{}], plain {}\n",
            o.orbit, o.n_i, o.m_i, o.invariant_table, o.source, o.plain_table
        ));
        if let Some(h) = &o.heuristic_table {
            out.push_str(&format!("  heuristic value before override: {h}\n"));
        }
    }
    out.push_str("\n## Caveats\n\n");
    for c in &r.caveats {
        out.push_str(&format!("- {c}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupfile::parse_group_str;

    fn joyce_file() -> GroupFile {
        parse_group_str(
            r#"{
                "name": "joyce-9-3-5",
                "dimension": 3,
                "cyclotomic_order": 4,
                "generators": [[["-1","0","0"],["0","z","0"],["0","0","z"]]]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn analyze_joyce_example() {
        let a = analyze(joyce_file(), 10_000).unwrap();
        let r = analyze_report(&a);
        assert_eq!(r.group_order, 4);
        assert_eq!(r.classes.len(), 4);
        let ages: Vec<usize> = r.classes.iter().map(|c| c.age).collect();
        assert_eq!(ages, vec![0, 1, 1, 2]);
        assert_eq!(r.orbit_count, 1);
        assert_eq!(r.length, 2);
        assert!(a.hypotheses_ok());
    }

    #[test]
    fn cohomology_joyce_example() {
        let a = analyze(joyce_file(), 10_000).unwrap();
        let r = cohomology_report(&a, Model::Auto).unwrap();
        assert_eq!(r.model, Model::Su3);
        let t = r.l2_table.as_ref().unwrap();
        assert_eq!((t.get(2), t.get(4)), (1, 1));
        assert_eq!(t.total(), 2);
        assert_eq!(r.chi_l2, 2);
        assert_eq!(r.mv_ok, Some(true));
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let a = analyze(joyce_file(), 10_000).unwrap();
        let r = cohomology_report(&a, Model::Auto).unwrap();
        let rendered = to_json(&r);
        let reparsed: serde_json::Value = serde_json::from_str(&rendered).unwrap();
        let rerendered = serde_json::to_string_pretty(&reparsed).unwrap();
        assert_eq!(rendered, rerendered);
    }

    #[test]
    fn override_shows_up_in_provenance() {
        let gf = parse_group_str(
            r#"{
                "name": "joyce-override",
                "dimension": 3,
                "cyclotomic_order": 4,
                "generators": [[["-1","0","0"],["0","z","0"],["0","0","z"]]],
                "overrides": {"0": {"2": 3}}
            }"#,
        )
        .unwrap();
        let a = analyze(gf, 10_000).unwrap();
        let r = cohomology_report(&a, Model::Ends).unwrap();
        assert_eq!(r.orbits[0].source, "override");
        assert_eq!(r.orbits[0].invariant_table.get(2), 3);
        assert_eq!(r.orbits[0].heuristic_table.as_ref().unwrap().get(2), 1);
        // the weighted end table reflects the override
        assert_eq!(r.end_l2_weighted.get(2), 3);
    }

    #[test]
    fn markdown_renders() {
        let a = analyze(joyce_file(), 10_000).unwrap();
        let ar = analyze_report(&a);
        let md = analyze_markdown(&ar);
        assert!(md.contains("Group of order 4"));
        let cr = cohomology_report(&a, Model::Auto).unwrap();
        let md2 = cohomology_markdown(&cr);
        assert!(md2.contains("chi_L2 = 2"));
    }

    #[test]
    fn ends_mode_covers_other_dimensions() {
        // n = 2: the binary A1 group acts freely off 0, pure ALE shape
        let a1 = parse_group_str(
            r#"{
                "name": "a1",
                "dimension": 2,
                "cyclotomic_order": 2,
                "generators": [[["-1","0"],["0","-1"]]]
            }"#,
        )
        .unwrap();
        let a = analyze(a1, 100).unwrap();
        let r = cohomology_report(&a, Model::Auto).unwrap();
        assert_eq!(r.model, Model::Ends);
        assert!(r.l2_table.is_none());
        assert_eq!(r.end_l2.get(3), 1);
        assert_eq!(r.boundary_betti.get(0), 1);
        assert!(r.caveats.iter().any(|c| c.contains("n = 2")));

        // n = 5: a free diagonal Z7 action; only the top end line survives
        let z7 = parse_group_str(
            r#"{
                "name": "free-z7",
                "dimension": 5,
                "cyclotomic_order": 7,
                "generators": [[["z","0","0","0","0"],
                                 ["0","z","0","0","0"],
                                 ["0","0","z","0","0"],
                                 ["0","0","0","z^2","0"],
                                 ["0","0","0","0","z^2"]]]
            }"#,
        )
        .unwrap();
        let a = analyze(z7, 100).unwrap();
        assert_eq!(a.group.len(), 7);
        assert!(a.report.strata.is_empty());
        let r = cohomology_report(&a, Model::Auto).unwrap();
        assert_eq!(r.model, Model::Ends);
        assert_eq!(r.end_l2.get(9), 1);
        assert_eq!(r.end_l2.total(), 1);
    }

    #[test]
    fn sp2_runs_carry_the_age_count_caveat() {
        let hilb2 = parse_group_str(
            r#"{
                "name": "hilb2-a1",
                "dimension": 4,
                "cyclotomic_order": 2,
                "generators": [
                    [["-1","0","0","0"],["0","-1","0","0"],["0","0","1","0"],["0","0","0","1"]],
                    [["1","0","0","0"],["0","1","0","0"],["0","0","-1","0"],["0","0","0","-1"]],
                    [["0","0","1","0"],["0","0","0","1"],["1","0","0","0"],["0","1","0","0"]]
                ]
            }"#,
        )
        .unwrap();
        let a = analyze(hilb2, 100).unwrap();
        let r = cohomology_report(&a, Model::Auto).unwrap();
        assert_eq!(r.model, Model::Sp2);
        assert_eq!(r.l2_table.as_ref().unwrap().get(4), 2);
        assert!(r.caveats.iter().any(|c| c.contains("age-2 class")));
    }
}
