//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::io::Write;
use std::time::Instant;

use common::{random_crossbar, random_messages, random_states, random_stream};
use hashpim::crossbar::{check_bundle, CrossbarConfig, Label};
use hashpim::keccak::{
    chi_microcode, iota_microcode, pi_microcode, rho_microcode, round_body_microcode,
    theta_microcode, variable_rotate, UnitLayout, UnitSet,
};
use hashpim::metrics::MetricsInput;
use hashpim::microcode::{schedule, schedule_serial, OpStream};
use hashpim::reference::{self, SoftState};
use hashpim::{HashPim, HashRun, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PAPER_CYCLES: f64 = 3494.0;
const PAPER_ENERGY_J: f64 = 0.765e-9;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn report(id: usize, name: &str, verdict: Result<Verdict>) -> bool {
    let v = verdict.unwrap_or_else(|e| Verdict::new(false, format!("error: {e}")));
    let line = format!(
        "criterion {id} [{name}]: {} ({})\n",
        if v.pass { "PASS" } else { "FAIL" },
        v.detail
    );
    std::io::stdout().write_all(line.as_bytes()).unwrap();
    v.pass
}

fn machine() -> HashPim {
    HashPim::new(CrossbarConfig::default()).expect("default crossbar")
}

fn matches_oracle(messages: &[Vec<u8>], run: &HashRun) -> usize {
    messages
        .iter()
        .zip(&run.digests)
        .filter(|(m, d)| d.as_bytes() == reference::sha3_256(m))
        .count()
}

fn functional(hp: &HashPim) -> Result<Verdict> {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut pass = true;

    let (empty, _) = hp.hash(b"")?;
    let (abc, _) = hp.hash(b"abc")?;
    let fixed = empty.to_hex()
        == "a7ffc6f8bf1ed76651c14756a061d662f580ff4de43b49fa82d80a4b80f8434a"
        && abc.to_hex() == "3a985da74fe225b2045c172d6bd390bd855f086e3e9d525b46bfe24511431532";
    pass &= fixed;
    notes.push(format!(
        "empty+abc {}",
        if fixed { "ok" } else { "MISMATCH" }
    ));

    let sweep = random_messages(0..=200, 0x5eed);
    let run = hp.hash_messages(&sweep, 1)?;
    let ok = matches_oracle(&sweep, &run);
    pass &= ok == sweep.len();
    notes.push(format!("lengths 0-200 {ok}/{}", sweep.len()));

    let mut rng = ChaCha8Rng::seed_from_u64(0x1_0000);
    let lens: Vec<usize> = (0..hp.capacity()).map(|_| rng.gen_range(0..400)).collect();
    let batch = random_messages(lens, 378);
    let run = hp.hash_messages(&batch, 1)?;
    let ok = matches_oracle(&batch, &run);
    pass &= ok == batch.len() && run.crossbars.len() == 1;
    notes.push(format!("{} concurrent {ok}/{}", batch.len(), batch.len()));

    let big = random_messages([1 << 20], 0xb16);
    let run = hp.hash_messages(&big, 1)?;
    let ok = matches_oracle(&big, &run) == 1;
    pass &= ok;
    notes.push(format!("1 MiB {}", if ok { "ok" } else { "MISMATCH" }));

    notes.push(format!(
        "{:.0} s (target < 300 s)",
        start.elapsed().as_secs_f64()
    ));
    Ok(Verdict::new(pass, notes.join(", ")))
}

type Step = fn(&UnitSet) -> Result<OpStream>;
type Oracle = fn(&mut SoftState);

fn step_equivalence(hp: &HashPim) -> Result<Verdict> {
    let ids: Vec<usize> = (0..100).collect();
    let units = UnitSet::new(*hp.geometry(), &ids)?;
    let steps: [(&str, Step, Oracle); 5] = [
        ("theta", theta_microcode, reference::theta),
        ("rho", rho_microcode, reference::rho),
        ("pi", pi_microcode, reference::pi),
        ("chi", chi_microcode, reference::chi),
        (
            "iota",
            |u| iota_microcode(u, 17),
            |s| reference::iota(s, 17),
        ),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (i, (name, step, oracle)) in steps.into_iter().enumerate() {
        let states = random_states(ids.len(), 200 + i as u64);
        let mut s = hp.session()?;
        for (&u, st) in ids.iter().zip(&states) {
            s.write_state(u, st)?;
        }
        s.execute(&step(&units)?)?;
        let mut ok = 0;
        for (&u, st) in ids.iter().zip(&states) {
            let mut want = SoftState::from_lanes(st);
            oracle(&mut want);
            ok += usize::from(s.read_state(u)? == want.lanes());
        }
        pass &= ok == ids.len();
        notes.push(format!("{name} {ok}/{}", ids.len()));
    }

    // 40 units x 25 lanes, offsets random per unit column
    let mut rng = ChaCha8Rng::seed_from_u64(0x707);
    let ids: Vec<usize> = (0..40).collect();
    let units = UnitSet::new(*hp.geometry(), &ids)?;
    let mut s = hp.session()?;
    let offsets: Vec<[[u32; 5]; 5]> = (0..hp.geometry().unit_columns)
        .map(|col| {
            let o: [[u32; 5]; 5] =
                std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(0..64)));
            s.load_offsets(col, &o).map(|_| o)
        })
        .collect::<Result<_>>()?;
    let states = random_states(ids.len(), 0x808);
    for (&u, st) in ids.iter().zip(&states) {
        s.write_state(u, st)?;
    }
    s.execute(&variable_rotate(&units, &(0..25).collect::<Vec<_>>())?)?;
    let (mut ok, mut total) = (0, 0);
    for (u, st) in units.units().iter().zip(&states) {
        let out = s.read_state(u.id)?;
        for lane in 0..25 {
            let r = offsets[u.column][lane % 5][lane / 5];
            ok += usize::from(out[lane] == st[lane].rotate_left(r));
            total += 1;
        }
    }
    pass &= ok == total && total >= 1000;
    notes.push(format!("rotation pairs {ok}/{total}"));
    Ok(Verdict::new(pass, notes.join(", ")))
}

fn print_breakdown(run: &HashRun) {
    let stats = run.stats();
    let rounds: u64 = run.crossbars.iter().map(|c| c.permutations).sum::<u64>() * 24;
    let unit_rounds: u64 = run
        .crossbars
        .iter()
        .map(|c| c.unit_permutations)
        .sum::<u64>()
        * 24;
    let mut out = String::from("  step    cycles/round   gate execs/unit/round   nJ/unit/round\n");
    for label in Label::ROUND_STEPS {
        let s = stats.label(label);
        let per_unit = s.gate_executions as f64 / unit_rounds as f64;
        out += &format!(
            "  {:<6} {:>13.1} {:>23.1} {:>15.4}\n",
            label.name(),
            s.cycles as f64 / rounds as f64,
            per_unit,
            per_unit * stats.gate_energy_fj() * 1e-6
        );
    }
    let total = stats.round_steps();
    let per_unit = total.gate_executions as f64 / unit_rounds as f64;
    out += &format!(
        "  {:<6} {:>13.1} {:>23.1} {:>15.4}\n",
        "total",
        total.cycles as f64 / rounds as f64,
        per_unit,
        per_unit * stats.gate_energy_fj() * 1e-6
    );
    std::io::stdout().write_all(out.as_bytes()).unwrap();
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    ((value - target) / target).abs() <= tol
}

fn cycles(run: &HashRun) -> Result<Verdict> {
    print_breakdown(run);
    let c = run.cycles_per_round().unwrap_or(0.0);
    Ok(Verdict::new(
        within(c, PAPER_CYCLES, 0.2),
        format!(
            "{c:.0} cycles/round vs 3494, {:+.1}%, 378-unit lockstep",
            (c / PAPER_CYCLES - 1.0) * 100.0
        ),
    ))
}

fn energy(hp: &HashPim, run: &HashRun) -> Result<Verdict> {
    let stats = run.stats();
    let e = run.energy_per_unit_round_j().unwrap_or(0.0);
    let steps = stats.round_steps();

    // recount gate executions from the compiled programs
    let units = UnitSet::all(*hp.geometry());
    let body: u64 = hp
        .compile(&round_body_microcode(&units)?)?
        .bundles()
        .iter()
        .map(|b| b.gate_executions())
        .sum();
    let iota: u64 = (0..24)
        .map(|r| {
            let p = hp.compile(&iota_microcode(&units, r)?)?;
            Ok(p.bundles().iter().map(|b| b.gate_executions()).sum::<u64>())
        })
        .sum::<Result<u64>>()?;
    let permutations: u64 = run.crossbars.iter().map(|c| c.permutations).sum();
    let recount = (24 * body + iota) * permutations;
    let exact = recount == steps.gate_executions
        && stats.energy_fj() == stats.gate_executions() as f64 * 6.4;

    Ok(Verdict::new(
        within(e, PAPER_ENERGY_J, 0.2) && exact,
        format!(
            "{:.4} nJ/unit/round vs 0.765, {:+.1}%, energy = executions x 6.4 fJ {}",
            e * 1e9,
            (e / PAPER_ENERGY_J - 1.0) * 100.0,
            if exact { "exact" } else { "MISMATCH" }
        ),
    ))
}

fn metrics() -> Result<Verdict> {
    let one = MetricsInput::paper().compute()?;
    let two = MetricsInput::paper().with_crossbars(2).compute()?;
    let pass = within(one.tput_system_bps, 39.2e9, 0.01)
        && within(two.tput_system_bps, 78.4e9, 0.01)
        && within(one.tput_per_watt, 1422e9, 0.01)
        && within(two.tput_per_watt, 1422e9, 0.01);
    Ok(Verdict::new(
        pass,
        format!(
            "1 XB {:.2} Gbps, 2 XB {:.2} Gbps, {:.1} Gbps/W, {:.0} bps/F2",
            one.tput_system_bps / 1e9,
            two.tput_system_bps / 1e9,
            one.tput_per_watt / 1e9,
            one.tput_per_area
        ),
    ))
}

fn packing(hp: &HashPim) -> Result<Verdict> {
    let g = hp.geometry();
    let map = hp.config().partition_map()?;
    let mut fits = true;
    for id in 0..g.capacity() {
        let u = g.unit(id)?;
        let rows = u.origin_row..u.origin_row + UnitLayout::ROWS;
        let cols = u.origin_col..u.origin_col + UnitLayout::COLS;
        fits &= map.row_band(rows.start) == map.row_band(rows.end - 1)
            && map.col_band(cols.start) == map.col_band(cols.end - 1)
            && rows.end <= g.rot_row0()
            && cols.end <= g.rc_col0();
    }
    let pass = g.capacity() == 378 && g.unit_columns == 27 && g.bands == 14 && fits;
    Ok(Verdict::new(
        pass,
        format!(
            "{} units of {}x{} in {}x{} partitions of a {}x{} crossbar",
            g.capacity(),
            UnitLayout::ROWS,
            UnitLayout::COLS,
            g.unit_columns,
            g.bands,
            g.rows,
            g.cols
        ),
    ))
}

fn scheduler() -> Result<Verdict> {
    let map = common::config().partition_map()?;
    let (mut equal, mut illegal, mut packed_total, mut serial_total, mut crossing) =
        (0, 0, 0, 0, 0);
    for seed in 0..1000u64 {
        let stream = random_stream(seed);
        let packed = schedule(&stream, &map)?;
        let serial = schedule_serial(&stream, &map)?;
        illegal += packed
            .iter()
            .filter(|b| !check_bundle(&map, b).is_legal())
            .count();
        crossing += packed
            .iter()
            .filter(|b| !b.closed_switches.is_empty())
            .count();
        let (mut a, mut b) = (random_crossbar(seed), random_crossbar(seed));
        for bundle in &serial {
            a.execute_bundle(bundle)?;
        }
        for bundle in &packed {
            b.execute_bundle(bundle)?;
        }
        equal += usize::from(a.grid() == b.grid());
        packed_total += packed.len();
        serial_total += serial.len();
    }
    Ok(Verdict::new(
        equal == 1000 && illegal == 0,
        format!(
            "{equal}/1000 streams equal serial, {illegal} illegal bundles, {packed_total} vs {serial_total} cycles, {crossing} bundles with closed switches"
        ),
    ))
}

fn main() {
    let hp = machine();
    let mut all = true;

    all &= report(1, "functional correctness", functional(&hp));
    all &= report(2, "step-level oracle equivalence", step_equivalence(&hp));

    let lockstep = random_messages(vec![100; hp.capacity()], 3494);
    let run = hp.hash_messages(&lockstep, 1);
    match run {
        Ok(run) => {
            all &= report(3, "cycles per round", cycles(&run));
            all &= report(4, "energy per round per unit", energy(&hp, &run));
        }
        Err(e) => {
            let failed = || Ok(Verdict::new(false, format!("error: {e}")));
            all &= report(3, "cycles per round", failed());
            all &= report(4, "energy per round per unit", failed());
        }
    }

    all &= report(5, "metrics reproduction", metrics());
    all &= report(6, "packing", packing(&hp));
    all &= report(7, "scheduler soundness", scheduler());

    if !all {
        std::process::exit(1);
    }
}
