//! Per-iteration metrics and the run report.
//!
//! Reports serialize to JSON (`schema: 1`) and to per-iteration CSV. Edge
//! work is counted two ways throughout: `edges_examined` is the edges whose
//! processing actually invoked the kernel (push counts every out-edge of an
//! active source; pull counts folds surviving the open/saturated filters),
//! while `edges_streamed` is the raw edge volume moved by pull block
//! dispatch before filtering. Throughput (MTEPS) is reported over
//! `edges_examined`.

use serde::Serialize;

use crate::dispatcher::{Mode, ModeSwitchReason, RatioSnapshot};

/// Work-group loop counters: push vertex groups plus the three pull
/// pipeline classes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LoopCounts {
    /// Push: `ceil(out_degree / 16)` summed over processed sources.
    pub push_groups: u64,
    /// Pull: `ceil(block_edges / 8)` summed over Small blocks.
    pub small: u64,
    /// Pull: `ceil(block_edges / 64)` summed over Middle blocks.
    pub middle: u64,
    /// Pull: `ceil(block_edges / 256)` summed over Large blocks.
    pub large: u64,
}

impl LoopCounts {
    pub fn total(&self) -> u64 {
        self.push_groups + self.small + self.middle + self.large
    }

    pub fn absorb(&mut self, other: &LoopCounts) {
        self.push_groups += other.push_groups;
        self.small += other.small;
        self.middle += other.middle;
        self.large += other.large;
    }
}

/// How one iteration executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecMode {
    /// Vertex-centric scatter over the active list (LowParallel).
    Push,
    /// Edge-centric block pull through the class pipelines (HighParallel).
    BlockPull,
    /// Vertex-centric pull over the transposed graph.
    VertexPull,
    /// Sequential full edge stream.
    Stream,
}

impl ExecMode {
    pub fn name(self) -> &'static str {
        match self {
            ExecMode::Push => "push",
            ExecMode::BlockPull => "block_pull",
            ExecMode::VertexPull => "vertex_pull",
            ExecMode::Stream => "stream",
        }
    }

    /// The dispatcher mode this execution style realizes.
    pub fn parallel_mode(self) -> Mode {
        match self {
            ExecMode::Push => Mode::LowParallel,
            _ => Mode::HighParallel,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationMetrics {
    pub iteration: u32,
    pub mode: ExecMode,
    /// Frontier size entering the iteration.
    pub active_vertices: u64,
    /// Logically activated blocks per class (Small, Middle, Large).
    pub active_blocks: [u64; 3],
    pub edges_examined: u64,
    pub edges_streamed: u64,
    pub loops: LoopCounts,
    /// Vertices whose state changed this iteration.
    pub newly_activated: u64,
    pub hub_activated: bool,
    pub ratios: RatioSnapshot,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModeSwitch {
    /// The switch took effect after this iteration completed.
    pub after_iteration: u32,
    pub from: Mode,
    pub to: Mode,
    pub reason: ModeSwitchReason,
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct RunTotals {
    pub iterations: u32,
    pub edges_examined: u64,
    pub edges_streamed: u64,
    pub loops: LoopCounts,
    pub wall_seconds: f64,
    /// Millions of examined edges per second over the whole run.
    pub mteps: f64,
}

/// Full run description, serialized with `schema: 1`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub algorithm: String,
    pub strategy: String,
    pub dataset: String,
    pub vertex_count: u32,
    pub edge_count: u64,
    pub group_power: u32,
    pub block_count: u64,
    /// Blocks per class (Small, Middle, Large).
    pub class_histogram: [u64; 3],
    pub params: ReportParams,
    pub totals: RunTotals,
    pub mode_switches: Vec<ModeSwitch>,
    pub iterations: Vec<IterationMetrics>,
    /// Algorithm-specific outcome summary.
    pub summary: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub hub_degree_threshold: u32,
    pub literal_inequalities: bool,
    pub workers: usize,
    pub pipe_capacity: usize,
    pub full_scan: bool,
    /// Algorithm parameters (source, damping, ...).
    pub algorithm: serde_json::Value,
}

/// Millions of traversed (examined) edges per second.
pub fn mteps(edges_examined: u64, wall_seconds: f64) -> f64 {
    if wall_seconds <= 0.0 {
        return 0.0;
    }
    edges_examined as f64 / (wall_seconds * 1e6)
}

impl RunReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("run report serializes")
    }

    /// Per-iteration CSV, header included even when empty.
    pub fn iterations_csv(&self) -> String {
        let mut out = String::from(
            "iteration,mode,active_vertices,active_small,active_middle,active_large,\
             edges_examined,edges_streamed,push_group_loops,small_loops,middle_loops,\
             large_loops,newly_activated,hub_activated,active_ratio,block_ratio,\
             flag_ratio,wall_seconds\n",
        );
        let ratio = |r: Option<f64>| r.map(|v| format!("{v:.6}")).unwrap_or_default();
        for m in &self.iterations {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:.9}\n",
                m.iteration,
                m.mode.name(),
                m.active_vertices,
                m.active_blocks[0],
                m.active_blocks[1],
                m.active_blocks[2],
                m.edges_examined,
                m.edges_streamed,
                m.loops.push_groups,
                m.loops.small,
                m.loops.middle,
                m.loops.large,
                m.newly_activated,
                m.hub_activated,
                ratio(m.ratios.active),
                ratio(m.ratios.block),
                ratio(m.ratios.flag),
                m.wall_seconds,
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mteps_matches_the_throughput_definition() {
        // 0.51 million edges in 6 ms is 85 MTEPS.
        assert!((mteps(510_000, 0.006) - 85.0).abs() < 1e-9);
        assert_eq!(mteps(1_000, 0.0), 0.0, "zero wall time reports zero");
    }

    fn sample_report() -> RunReport {
        RunReport {
            schema: 1,
            algorithm: "bfs".into(),
            strategy: "dm".into(),
            dataset: "sample".into(),
            vertex_count: 4,
            edge_count: 3,
            group_power: 1,
            block_count: 1,
            class_histogram: [1, 0, 0],
            params: ReportParams {
                alpha: 0.05,
                beta: 0.05,
                gamma: 0.9,
                hub_degree_threshold: 2048,
                literal_inequalities: false,
                workers: 1,
                pipe_capacity: 64,
                full_scan: false,
                algorithm: serde_json::json!({"source": 0}),
            },
            totals: RunTotals {
                iterations: 1,
                edges_examined: 3,
                edges_streamed: 0,
                loops: LoopCounts {
                    push_groups: 1,
                    ..LoopCounts::default()
                },
                wall_seconds: 0.001,
                mteps: mteps(3, 0.001),
            },
            mode_switches: vec![ModeSwitch {
                after_iteration: 0,
                from: Mode::LowParallel,
                to: Mode::HighParallel,
                reason: ModeSwitchReason::HubActivation,
            }],
            iterations: vec![IterationMetrics {
                iteration: 0,
                mode: ExecMode::Push,
                active_vertices: 1,
                active_blocks: [1, 0, 0],
                edges_examined: 3,
                edges_streamed: 0,
                loops: LoopCounts {
                    push_groups: 1,
                    ..LoopCounts::default()
                },
                newly_activated: 2,
                hub_activated: true,
                ratios: RatioSnapshot {
                    active: Some(0.5),
                    block: None,
                    flag: None,
                },
                wall_seconds: 0.001,
            }],
            summary: serde_json::json!({"reached": 3}),
        }
    }

    #[test]
    fn report_serializes_with_schema_and_enums_as_snake_case() {
        let json: serde_json::Value =
            serde_json::from_str(&sample_report().to_json_string()).unwrap();
        assert_eq!(json["schema"], 1);
        assert_eq!(json["iterations"][0]["mode"], "push");
        assert_eq!(json["mode_switches"][0]["from"], "low_parallel");
        assert_eq!(json["mode_switches"][0]["reason"], "hub_activation");
        assert_eq!(
            json["iterations"][0]["ratios"]["block"],
            serde_json::Value::Null
        );
        assert_eq!(json["params"]["algorithm"]["source"], 0);
    }

    #[test]
    fn csv_has_header_and_one_row_per_iteration() {
        let report = sample_report();
        let csv = report.iterations_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("iteration,mode,active_vertices"));
        assert!(lines[1].starts_with("0,push,1,1,0,0,3,0,1,0,0,0,2,true,0.500000,,,"));

        let empty = RunReport {
            iterations: vec![],
            ..report
        };
        assert_eq!(empty.iterations_csv().lines().count(), 1, "header only");
    }

    #[test]
    fn loop_totals_sum_all_classes() {
        let mut loops = LoopCounts {
            push_groups: 1,
            small: 2,
            middle: 3,
            large: 4,
        };
        assert_eq!(loops.total(), 10);
        loops.absorb(&LoopCounts {
            push_groups: 1,
            small: 1,
            middle: 1,
            large: 1,
        });
        assert_eq!(loops.total(), 14);
    }
}
