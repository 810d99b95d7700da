use std::fmt::Write as _;
use std::path::Path;

use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::value::RawValue;

use qbayes::bayesnet::bitstring;
use qbayes::compiler::{compile_qsample, compile_s0};
use qbayes::inference::{batch_sample, chain_family, scaling_run, ScalingConfig};
use qbayes::{
    Assignment, BayesNet, Circuit, GateCount, GroverOperators, MczMode, ScheduleConfig,
    ScheduleMode, Statevector,
};

use crate::error::CliError;
use crate::format::{fixed10, raw, raw10, significant};
use crate::{CompareOpts, Method, Operator, Opts, OutputFormat};

/// Map that keeps insertion order when serialized.
struct Ordered<V>(Vec<(&'static str, V)>);

type NamedBits<'a> = OrderedBorrowed<'a, u8>;

/// [`Ordered`] with borrowed keys.
struct OrderedBorrowed<'a, V>(Vec<(&'a str, V)>);

impl<V: Serialize> Serialize for Ordered<V> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        OrderedBorrowed(self.0.iter().map(|(k, v)| (*k, v)).collect()).serialize(s)
    }
}

impl<V: Serialize> Serialize for OrderedBorrowed<'_, V> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

struct Problem {
    net: BayesNet,
    evidence: Assignment,
    query: Vec<usize>,
}

impl Problem {
    fn load(o: &Opts) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(&o.net)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", o.net.display())))?;
        let net = BayesNet::parse(&text)?;
        let evidence = net.parse_evidence(&o.evidence).map_err(CliError::Input)?;
        let query = match &o.query {
            Some(spec) => net.parse_query(spec).map_err(CliError::Input)?,
            None => net.default_query(&evidence),
        };
        if let Some(&q) = query.iter().find(|&&q| evidence.get(q).is_some()) {
            return Err(CliError::Input(format!(
                "node `{}` is both queried and observed",
                net.node(q).name()
            )));
        }
        Ok(Self {
            net,
            evidence,
            query,
        })
    }

    fn name(&self, i: usize) -> &str {
        self.net.node(i).name()
    }

    fn query_names(&self) -> Vec<&str> {
        self.query.iter().map(|&q| self.name(q)).collect()
    }

    fn evidence_bits(&self) -> NamedBits<'_> {
        OrderedBorrowed(
            self.evidence
                .iter()
                .map(|(n, b)| (self.name(n), b as u8))
                .collect(),
        )
    }

    /// Query outcome packed with `query[j]` in bit `j`.
    fn query_bits(&self, packed: u64) -> NamedBits<'_> {
        OrderedBorrowed(
            self.query
                .iter()
                .enumerate()
                .map(|(j, &q)| (self.name(q), ((packed >> j) & 1) as u8))
                .collect(),
        )
    }

    /// Query outcome as a string, first query node first.
    fn query_string(&self, packed: u64) -> String {
        (0..self.query.len())
            .map(|j| if (packed >> j) & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn csv_header(cols: &[&str]) -> String {
    let mut s = cols.join(",");
    s.push('\n');
    s
}

pub fn exact(o: &Opts) -> Result<(), CliError> {
    let p = Problem::load(o)?;
    let dist = p.net.exact_inference(&p.query, &p.evidence)?;
    let p_evidence = p.net.marginal_probability(&p.evidence)?;

    let mut rows: Vec<(String, u64, f64)> = dist
        .probs
        .iter()
        .enumerate()
        .map(|(v, &pr)| (p.query_string(v as u64), v as u64, pr))
        .collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0));

    let text = match o.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => {
            #[derive(serde::Serialize)]
            struct Entry<'a> {
                bits: String,
                assignment: NamedBits<'a>,
                p: Box<RawValue>,
            }
            #[derive(serde::Serialize)]
            struct Report<'a> {
                query: Vec<&'a str>,
                evidence: NamedBits<'a>,
                p_evidence: Box<RawValue>,
                distribution: Vec<Entry<'a>>,
            }
            to_json(&Report {
                query: p.query_names(),
                evidence: p.evidence_bits(),
                p_evidence: raw10(p_evidence),
                distribution: rows
                    .into_iter()
                    .map(|(bits, v, pr)| Entry {
                        bits,
                        assignment: p.query_bits(v),
                        p: raw10(pr),
                    })
                    .collect(),
            })
        }
        OutputFormat::Csv => {
            let mut cols = p.query_names();
            cols.push("p");
            let mut s = csv_header(&cols);
            for (bits, _, pr) in rows {
                for c in bits.chars() {
                    write!(s, "{c},").unwrap();
                }
                writeln!(s, "{}", fixed10(pr)).unwrap();
            }
            s
        }
    };
    emit(o.out.as_deref(), &text)
}

#[derive(serde::Serialize)]
struct SampleConfigEcho<'a> {
    net: String,
    evidence: NamedBits<'a>,
    query: Vec<&'a str>,
    samples: usize,
    seed: u64,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    schedule: Option<ScheduleConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    draw_budget: Option<u64>,
}

pub fn sample(o: &Opts) -> Result<(), CliError> {
    let p = Problem::load(o)?;
    let mut echo = SampleConfigEcho {
        net: o.net.display().to_string(),
        evidence: p.evidence_bits(),
        query: p.query_names(),
        samples: o.samples,
        seed: o.seed,
        method: "",
        schedule: None,
        draw_budget: None,
    };

    struct Drawn {
        /// Query bits packed in query order.
        outcomes: Vec<u64>,
        cost_names: &'static [&'static str],
        cost_rows: Vec<Vec<u64>>,
        summary: Ordered<Box<RawValue>>,
    }
    let drawn = match o.method {
        Method::Quantum => {
            let schedule = ScheduleConfig {
                mode: o.schedule,
                max_rounds: o.max_rounds,
                restart_cap: o.restart_cap,
                mcz: o.mcz,
            };
            echo.method = "quantum";
            echo.schedule = Some(schedule);
            let report = batch_sample(&p.net, &p.query, &p.evidence, o.samples, schedule, o.seed)
                .map_err(|e| CliError::from(e.source))?;
            let t = report.totals;
            let summary = vec![
                ("mean_a_applications", raw10(report.mean_a_applications())),
                ("mean_grover", raw10(report.mean_grover())),
                ("mean_rounds", raw10(report.mean_rounds())),
                ("total_a_applications", raw(t.a_applications.to_string())),
                ("total_grover", raw(t.grover.to_string())),
                ("total_rounds", raw(t.rounds.to_string())),
            ];
            Drawn {
                outcomes: report.samples.iter().map(|s| s.query_bits).collect(),
                cost_names: &["a_applications", "grover", "rounds"],
                cost_rows: report
                    .samples
                    .iter()
                    .map(|s| vec![s.cost.a_applications, s.cost.grover, s.cost.rounds])
                    .collect(),
                summary: Ordered(summary),
            }
        }
        Method::Classical => {
            echo.method = "classical";
            echo.draw_budget = Some(o.draw_budget);
            let report = p.net.classical_rejection_sample(
                &p.query,
                &p.evidence,
                o.samples,
                o.seed,
                o.draw_budget,
            )?;
            let summary = vec![
                ("mean_draws", raw10(report.mean_draws())),
                ("total_draws", raw(report.total_draws.to_string())),
                (
                    "total_cpt_lookups",
                    raw(report.total_cpt_lookups.to_string()),
                ),
                (
                    "total_parent_inspections",
                    raw(report.total_parent_inspections.to_string()),
                ),
            ];
            Drawn {
                outcomes: report.samples.iter().map(|s| s.query_bits).collect(),
                cost_names: &["draws"],
                cost_rows: report.samples.iter().map(|s| vec![s.draws]).collect(),
                summary: Ordered(summary),
            }
        }
    };

    let text = match o.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => {
            #[derive(serde::Serialize)]
            struct Report<'a> {
                config: SampleConfigEcho<'a>,
                samples: Vec<NamedBits<'a>>,
                cost: Ordered<Box<RawValue>>,
            }
            to_json(&Report {
                samples: drawn.outcomes.iter().map(|&v| p.query_bits(v)).collect(),
                config: echo,
                cost: drawn.summary,
            })
        }
        OutputFormat::Csv => {
            let mut cols = vec!["sample"];
            cols.extend(p.query_names());
            cols.extend(drawn.cost_names);
            let mut s = csv_header(&cols);
            for (i, (&v, costs)) in drawn.outcomes.iter().zip(&drawn.cost_rows).enumerate() {
                write!(s, "{i}").unwrap();
                for c in p.query_string(v).chars() {
                    write!(s, ",{c}").unwrap();
                }
                for c in costs {
                    write!(s, ",{c}").unwrap();
                }
                s.push('\n');
            }
            s
        }
    };
    emit(o.out.as_deref(), &text)
}

struct Operators {
    prep: Circuit,
    s_0: Circuit,
    /// `S_e` and `G`, present when there is evidence.
    grover: Option<(Circuit, Circuit)>,
}

impl Operators {
    fn compile(p: &Problem) -> Result<Self, CliError> {
        if p.evidence.is_empty() {
            return Ok(Self {
                prep: compile_qsample(&p.net),
                s_0: compile_s0(p.net.len()),
                grover: None,
            });
        }
        let ops = GroverOperators::compile(&p.net, &p.evidence)?;
        Ok(Self {
            prep: ops.prep,
            s_0: ops.s_0,
            grover: Some((ops.s_e, ops.iterate)),
        })
    }

    fn named(&self) -> Vec<(&'static str, &Circuit)> {
        let mut v = vec![("A_B", &self.prep)];
        if let Some((s_e, _)) = &self.grover {
            v.push(("S_e", s_e));
        }
        v.push(("S_0", &self.s_0));
        if let Some((_, g)) = &self.grover {
            v.push(("G", g));
        }
        v
    }

    fn get(&self, op: Operator) -> Result<&Circuit, CliError> {
        match (op, &self.grover) {
            (Operator::Prep, _) => Ok(&self.prep),
            (Operator::S0, _) => Ok(&self.s_0),
            (Operator::Se, Some((s_e, _))) => Ok(s_e),
            (Operator::G, Some((_, g))) => Ok(g),
            _ => Err(CliError::Input("S_e and G need evidence".into())),
        }
    }
}

fn write_dump(o: &Opts, ops: &Operators) -> Result<(), CliError> {
    let Some(path) = &o.dump else { return Ok(()) };
    let circuit = ops.get(o.dump_op)?;
    let text = match o.mcz {
        MczMode::Primitive => circuit.to_jsonl(),
        MczMode::Compiled => circuit.expand_mcz().to_jsonl(),
    };
    emit(Some(path), &text)
}

pub fn gatecount(o: &Opts) -> Result<(), CliError> {
    let p = Problem::load(o)?;
    let ops = Operators::compile(&p)?;
    write_dump(o, &ops)?;

    let text = match o.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => {
            #[derive(serde::Serialize)]
            struct Op {
                operator: &'static str,
                primitive: GateCount,
                compiled: GateCount,
            }
            #[derive(serde::Serialize)]
            struct Report<'a> {
                net: String,
                nodes: usize,
                max_indegree: usize,
                evidence: NamedBits<'a>,
                operators: Vec<Op>,
            }
            to_json(&Report {
                net: o.net.display().to_string(),
                nodes: p.net.len(),
                max_indegree: p.net.max_indegree(),
                evidence: p.evidence_bits(),
                operators: ops
                    .named()
                    .into_iter()
                    .map(|(operator, c)| Op {
                        operator,
                        primitive: c.gate_count(MczMode::Primitive),
                        compiled: c.gate_count(MczMode::Compiled),
                    })
                    .collect(),
            })
        }
        OutputFormat::Csv => {
            let mut s = csv_header(&[
                "operator", "mode", "roty", "phase", "x", "cnot", "mcz", "total",
            ]);
            for (name, c) in ops.named() {
                for (mode, label) in [
                    (MczMode::Primitive, "primitive"),
                    (MczMode::Compiled, "compiled"),
                ] {
                    let g = c.gate_count(mode);
                    writeln!(
                        s,
                        "{name},{label},{},{},{},{},{},{}",
                        g.roty, g.phase, g.x, g.cnot, g.mcz, g.total
                    )
                    .unwrap();
                }
            }
            s
        }
    };
    emit(o.out.as_deref(), &text)
}

pub fn prep_state(o: &Opts) -> Result<(), CliError> {
    let p = Problem::load(o)?;
    let n = p.net.len();
    let mut psi = Statevector::zero(n)?;
    let ops = Operators {
        prep: compile_qsample(&p.net),
        s_0: compile_s0(n),
        grover: None,
    };
    write_dump(o, &ops)?;
    psi.apply(&ops.prep, o.mcz)?;

    let text = match o.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Json => {
            #[derive(serde::Serialize)]
            struct Amp {
                index: usize,
                bitstring: String,
                re: Box<RawValue>,
                im: Box<RawValue>,
                prob: Box<RawValue>,
            }
            #[derive(serde::Serialize)]
            struct Report {
                width: usize,
                amplitudes: Vec<Amp>,
            }
            to_json(&Report {
                width: n,
                amplitudes: psi
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .map(|(i, a)| Amp {
                        index: i,
                        bitstring: bitstring(i as u64, n),
                        re: raw(significant(a.re, 12)),
                        im: raw(significant(a.im, 12)),
                        prob: raw(significant(a.norm_sqr(), 12)),
                    })
                    .collect(),
            })
        }
        OutputFormat::Csv => {
            let mut s = csv_header(&["index", "bitstring", "re", "im", "prob"]);
            for (i, a) in psi.amplitudes().iter().enumerate() {
                writeln!(
                    s,
                    "{i},{},{},{},{}",
                    bitstring(i as u64, n),
                    significant(a.re, 12),
                    significant(a.im, 12),
                    significant(a.norm_sqr(), 12)
                )
                .unwrap();
            }
            s
        }
    };
    emit(o.out.as_deref(), &text)
}

pub fn compare(o: &CompareOpts) -> Result<(), CliError> {
    if o.k_min == 0 || o.k_min > o.k_max {
        return Err(CliError::Input(format!(
            "k range {}..={} must be non-empty and start at 1 or more",
            o.k_min, o.k_max
        )));
    }
    let ks: Vec<usize> = (o.k_min..=o.k_max).collect();
    let config = ScalingConfig {
        samples: o.samples,
        seed: o.seed,
        schedule: o.schedule,
        max_rounds: o.max_rounds,
        mcz: o.mcz,
    };
    let table = scaling_run(chain_family, &ks, &config)?;
    let rounds_for = |k: usize| {
        o.max_rounds
            .unwrap_or_else(|| ScheduleConfig::evidence_bounded(o.schedule, k).max_rounds)
    };

    let text = match o.format {
        OutputFormat::Json => {
            #[derive(serde::Serialize)]
            struct Echo {
                family: &'static str,
                k_min: usize,
                k_max: usize,
                samples: usize,
                seed: u64,
                schedule: ScheduleMode,
                max_rounds: String,
                mcz: MczMode,
            }
            #[derive(serde::Serialize)]
            struct Point {
                k: usize,
                p_evidence: Box<RawValue>,
                max_rounds: u32,
                classical_mean_draws: Box<RawValue>,
                quantum_mean_a_applications: Box<RawValue>,
                quantum_mean_grover: Box<RawValue>,
            }
            #[derive(serde::Serialize)]
            struct Report {
                config: Echo,
                points: Vec<Point>,
                #[serde(skip_serializing_if = "Option::is_none")]
                classical_slope: Option<Box<RawValue>>,
                #[serde(skip_serializing_if = "Option::is_none")]
                quantum_slope: Option<Box<RawValue>>,
            }
            to_json(&Report {
                config: Echo {
                    family: "chain",
                    k_min: o.k_min,
                    k_max: o.k_max,
                    samples: o.samples,
                    seed: o.seed,
                    schedule: o.schedule,
                    max_rounds: o
                        .max_rounds
                        .map_or("evidence-bounded".into(), |r| r.to_string()),
                    mcz: o.mcz,
                },
                points: table
                    .points
                    .iter()
                    .map(|pt| Point {
                        k: pt.k,
                        p_evidence: raw10(pt.p_evidence),
                        max_rounds: rounds_for(pt.k),
                        classical_mean_draws: raw10(pt.classical_mean_draws),
                        quantum_mean_a_applications: raw10(pt.quantum_mean_a_applications),
                        quantum_mean_grover: raw10(pt.quantum_mean_grover),
                    })
                    .collect(),
                classical_slope: table.classical_slope.map(raw10),
                quantum_slope: table.quantum_slope.map(raw10),
            })
        }
        OutputFormat::Csv => {
            let mut s = csv_header(&[
                "k",
                "p_evidence",
                "max_rounds",
                "classical_mean_draws",
                "quantum_mean_a_applications",
                "quantum_mean_grover",
            ]);
            for pt in &table.points {
                writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    pt.k,
                    fixed10(pt.p_evidence),
                    rounds_for(pt.k),
                    fixed10(pt.classical_mean_draws),
                    fixed10(pt.quantum_mean_a_applications),
                    fixed10(pt.quantum_mean_grover)
                )
                .unwrap();
            }
            if let (Some(c), Some(q)) = (table.classical_slope, table.quantum_slope) {
                writeln!(s, "# classical_slope={}", fixed10(c)).unwrap();
                writeln!(s, "# quantum_slope={}", fixed10(q)).unwrap();
            }
            s
        }
    };
    emit(o.out.as_deref(), &text)
}
