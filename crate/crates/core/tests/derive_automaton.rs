//! Checks the hard-coded Fife automaton table against the overlap oracle,
//! and (ignored, for development) re-derives the whole table from scratch.
//!
//! The ground truth: a path prefix `p` (consuming levels `0..k`, decoded
//! word `d`) admits letter `a` exactly when some infinite binary word `z`
//! keeps `d · mu^k(c(a)) · mu^{k+1}(z)` overlap-free. Liveness is tested by
//! depth-first search over `z` with a generous margin; tail letters for
//! `0^omega` endings are tested by appending a long Thue-Morse (or
//! complemented) tail.

use std::collections::HashMap;

use ovlf_core::fife::{build_automaton, FifeAutomaton};
use ovlf_core::powerfree::has_overlap_from;
use ovlf_core::words::{thue_morse_prefix, FiniteWord};

/// Depth of the exhaustive table check.
const CHECK_DEPTH: u32 = 7;

struct Ctx {
    t: FiniteWord,
    tbar: FiniteWord,
    memo: HashMap<(FiniteWord, u32), bool>,
}

impl Ctx {
    fn new(max_len: u64) -> Self {
        let t = thue_morse_prefix(max_len);
        let tbar = t.complement();
        Ctx {
            t,
            tbar,
            memo: HashMap::new(),
        }
    }

    /// Appends `mu^level(bit)`, i.e. a `2^level`-symbol Thue-Morse block.
    fn push_block(&self, w: &mut FiniteWord, level: u32, bit: u8) {
        let len = 1u64 << level;
        let src = if bit == 0 { &self.t } else { &self.tbar };
        w.append(&src.slice(0..len));
    }

    /// Appends `mu^level(c(letter))`.
    fn push_letter(&self, w: &mut FiniteWord, level: u32, letter: u8) {
        match letter {
            0 => {}
            1 => self.push_block(w, level, 0),
            2 => {
                self.push_block(w, level, 0);
                self.push_block(w, level, 0);
            }
            3 => self.push_block(w, level, 1),
            4 => {
                self.push_block(w, level, 1);
                self.push_block(w, level, 1);
            }
            _ => unreachable!(),
        }
    }

    /// Whether some infinite `z` keeps `w · mu^level(z)` overlap-free.
    /// `w` itself must already be overlap-free.
    fn alive(&mut self, w: &FiniteWord, level: u32) -> bool {
        let key = (w.clone(), level);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        // Margin: append at least twice the current length (at least 256
        // and at most 2048 symbols, at least 6 blocks) before declaring the
        // prefix alive. Capped so deep levels stay tractable; the shipped
        // cross-validation suite rechecks the table at larger scales.
        let margin = (2 * w.len()).clamp(256, 2048);
        let blocks = margin.div_ceil(1 << level).max(6);
        let mut scratch = w.clone();
        let v = self.search(&mut scratch, level, blocks);
        self.memo.insert(key, v);
        v
    }

    fn search(&self, w: &mut FiniteWord, level: u32, remaining: u64) -> bool {
        if remaining == 0 {
            return true;
        }
        for bit in [0u8, 1u8] {
            let old = w.len();
            self.push_block(w, level, bit);
            if !has_overlap_from(w, old) && self.search(w, level, remaining - 1) {
                w.truncate(old);
                return true;
            }
            w.truncate(old);
        }
        false
    }

    /// Which tail letters `a` keep `w · mu^omega(a)` overlap-free, as a
    /// bitmask (bit 0 for tail `0`, bit 1 for tail `1`).
    fn tail_mask(&self, w: &FiniteWord) -> u8 {
        let tail_len = (4 * w.len()).max(1024);
        let mut mask = 0u8;
        for bit in [0u8, 1u8] {
            let mut v = w.clone();
            let src = if bit == 0 { &self.t } else { &self.tbar };
            v.append(&src.slice(0..tail_len));
            if !has_overlap_from(&v, w.len()) {
                mask |= 1 << bit;
            }
        }
        mask
    }
}

/// Where 0-edges lead from `state`: the admissible tail mask of the
/// eventual 0-cycle, or 0 if the 0-edges die out.
fn reachable_tail_mask(aut: &FifeAutomaton, mut state: usize) -> u8 {
    let mut seen = vec![false; aut.state_count()];
    loop {
        if seen[state] {
            let set = aut
                .tail_letters(state)
                .expect("state on a 0-cycle must carry a tail set");
            return u8::from(set.zero) | (u8::from(set.one) << 1);
        }
        seen[state] = true;
        match aut.transition(state, 0) {
            Some(next) => state = next,
            None => return 0,
        }
    }
}

/// Walks every alive path prefix to `depth`, asserting that the automaton's
/// defined transitions and tail sets agree with the oracle at every node.
fn check_node(
    ctx: &mut Ctx,
    aut: &FifeAutomaton,
    state: usize,
    path: &mut Vec<u8>,
    decoded: &FiniteWord,
    depth: u32,
    seen_states: &mut Vec<bool>,
) {
    seen_states[state] = true;

    let oracle_tails = ctx.tail_mask(decoded);
    let table_tails = reachable_tail_mask(aut, state);
    assert_eq!(
        oracle_tails,
        table_tails,
        "tail letters disagree at path {path:?} (state {})",
        aut.name(state)
    );

    if depth == 0 {
        return;
    }
    for letter in 0u8..5 {
        let mut next = decoded.clone();
        ctx.push_letter(&mut next, path.len() as u32, letter);
        let level = path.len() as u32 + 1;
        let oracle_alive = !has_overlap_from(&next, decoded.len()) && ctx.alive(&next, level);
        let table_alive = aut.transition(state, letter).is_some();
        assert_eq!(
            oracle_alive,
            table_alive,
            "letter {letter} after path {path:?} (state {}): oracle says {}",
            aut.name(state),
            if oracle_alive { "alive" } else { "dead" },
        );
        if oracle_alive {
            path.push(letter);
            check_node(
                ctx,
                aut,
                aut.transition(state, letter).unwrap(),
                path,
                &next,
                depth - 1,
                seen_states,
            );
            path.pop();
        }
    }
}

#[test]
fn table_matches_overlap_oracle() {
    let aut = build_automaton();
    let mut ctx = Ctx::new(1 << 17);
    let mut seen = vec![false; aut.state_count()];
    let mut path = Vec::new();
    check_node(
        &mut ctx,
        &aut,
        aut.start(),
        &mut path,
        &FiniteWord::new(),
        CHECK_DEPTH,
        &mut seen,
    );
    let missing: Vec<_> = (0..aut.state_count())
        .filter(|&s| !seen[s])
        .map(|s| aut.name(s))
        .collect();
    assert!(
        missing.is_empty(),
        "states {missing:?} not reached within depth {CHECK_DEPTH}; the check \
         did not exercise their rows"
    );
}

/// Full re-derivation with state identification. Development tool: run with
/// `cargo test --release -- --ignored derive_full_table --nocapture`.
#[test]
#[ignore = "development tool; slow"]
fn derive_full_table() {
    let depth: u32 = std::env::var("DERIVE_DEPTH")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(9);
    let lookahead: u32 = std::env::var("DERIVE_LOOKAHEAD")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(3);

    let mut ctx = Ctx::new(1 << 18);

    // Enumerate the alive-prefix tree.
    #[derive(Clone)]
    struct Node {
        path: Vec<u8>,
        alive: [bool; 5],
        children: [Option<usize>; 5],
        tails: u8,
    }
    let mut nodes: Vec<Node> = vec![Node {
        path: vec![],
        alive: [false; 5],
        children: [None; 5],
        tails: ctx.tail_mask(&FiniteWord::new()),
    }];

    fn expand(ctx: &mut Ctx, nodes: &mut Vec<Node>, id: usize, decoded: &FiniteWord, depth: u32) {
        if depth == 0 {
            return;
        }
        for letter in 0u8..5 {
            let mut next = decoded.clone();
            let level = nodes[id].path.len() as u32;
            ctx.push_letter(&mut next, level, letter);
            let alive = !has_overlap_from(&next, decoded.len()) && ctx.alive(&next, level + 1);
            nodes[id].alive[letter as usize] = alive;
            if alive {
                let mut path = nodes[id].path.clone();
                path.push(letter);
                let tails = ctx.tail_mask(&next);
                let child = nodes.len();
                nodes.push(Node {
                    path,
                    alive: [false; 5],
                    children: [None; 5],
                    tails,
                });
                nodes[id].children[letter as usize] = Some(child);
                expand(ctx, nodes, child, &next, depth - 1);
            }
        }
    }
    let root_decoded = FiniteWord::new();
    expand(&mut ctx, &mut nodes, 0, &root_decoded, depth);
    println!("alive prefix tree: {} nodes", nodes.len());

    // Depth-bounded behavioural signature of a node.
    fn signature(nodes: &[Node], id: usize, lookahead: u32) -> String {
        let n = &nodes[id];
        if lookahead == 0 {
            return format!("[{:?}|{}]", n.alive, n.tails);
        }
        let kids: Vec<String> = (0..5)
            .map(|l| match n.children[l] {
                Some(c) => signature(nodes, c, lookahead - 1),
                None => "-".into(),
            })
            .collect();
        format!("[{:?}|{}|{}]", n.alive, n.tails, kids.join(","))
    }

    // Partition only nodes whose whole lookahead window sits in the zone
    // where liveness margins are never capped (levels <= 8) and whose
    // signatures consume only fully expanded layers; deeper verdicts can
    // wobble with the margin cap and would inject spurious distinctions.
    // Report how the partition refines as lookahead grows.
    assert!(depth > lookahead, "depth must exceed lookahead");
    let cutoff = (depth - lookahead - 1).min(5);
    for la in 1..=lookahead {
        let mut classes: HashMap<String, Vec<Vec<u8>>> = HashMap::new();
        for (id, node) in nodes.iter().enumerate() {
            if node.path.len() as u32 <= cutoff {
                classes
                    .entry(signature(&nodes, id, la))
                    .or_default()
                    .push(node.path.clone());
            }
        }
        println!("lookahead {la}: {} classes", classes.len());
        if la == lookahead {
            for members in classes.values() {
                let mut shortest: Vec<_> = members.clone();
                shortest.sort_by_key(|p| (p.len(), p.clone()));
                println!("  class rep {:?} ({} members)", shortest[0], members.len());
            }
        }
    }
    let mut class_of: HashMap<String, usize> = HashMap::new();
    let mut reps: Vec<usize> = Vec::new();
    let mut node_class: HashMap<usize, usize> = HashMap::new();
    for (id, node) in nodes.iter().enumerate() {
        if node.path.len() as u32 > cutoff {
            continue;
        }
        let sig = signature(&nodes, id, lookahead);
        let next_class = reps.len();
        let class = *class_of.entry(sig).or_insert_with(|| {
            reps.push(id);
            next_class
        });
        node_class.insert(id, class);
    }
    // Use the shallowest member as each class representative; every class
    // must appear strictly inside the zone, so that its outgoing
    // transitions land on classified nodes.
    for (&id, &cls) in &node_class {
        if nodes[id].path.len() < nodes[reps[cls]].path.len() {
            reps[cls] = id;
        }
    }
    for (cls, &rep) in reps.iter().enumerate() {
        assert!(
            (nodes[rep].path.len() as u32) < cutoff,
            "class {cls} appears only at the zone boundary ({:?})",
            nodes[rep].path
        );
    }

    // Transitions between classes; consistency across members.
    let mut delta: Vec<[Option<usize>; 5]> = vec![[None; 5]; reps.len()];
    let mut fixed: Vec<[bool; 5]> = vec![[false; 5]; reps.len()];
    for (&id, &cls) in &node_class {
        for l in 0..5 {
            if let Some(child) = nodes[id].children[l] {
                if let Some(&child_cls) = node_class.get(&child) {
                    if fixed[cls][l] {
                        assert_eq!(
                            delta[cls][l],
                            Some(child_cls),
                            "inconsistent transition from class {cls} on {l}"
                        );
                    } else {
                        delta[cls][l] = Some(child_cls);
                        fixed[cls][l] = true;
                    }
                }
            } else if fixed[cls][l] {
                assert_eq!(delta[cls][l], None, "inconsistent dead edge {cls} on {l}");
            } else {
                fixed[cls][l] = true;
            }
        }
    }

    // Report.
    println!("classes: {}", reps.len());
    for (cls, &rep) in reps.iter().enumerate() {
        let n = &nodes[rep];
        let arrows: Vec<String> = (0..5)
            .filter_map(|l| delta[cls][l].map(|d| format!("{l}->{d}")))
            .collect();
        println!(
            "class {cls}: path {:?} tails {:02b} edges {}",
            n.path,
            n.tails,
            arrows.join(" ")
        );
    }

    // Compare against the shipped table by parallel walk.
    let aut = build_automaton();
    let mut pairs = vec![(0usize, aut.start())];
    let mut visited = HashMap::new();
    visited.insert(0usize, aut.start());
    let mut agree = true;
    while let Some((cls, st)) = pairs.pop() {
        for l in 0..5u8 {
            let a = delta[cls][l as usize];
            let b = aut.transition(st, l);
            match (a, b) {
                (None, None) => {}
                (Some(ac), Some(bs)) => {
                    if let Some(&prev) = visited.get(&ac) {
                        if prev != bs {
                            println!("MISMATCH: class {ac} maps to two states");
                            agree = false;
                        }
                    } else {
                        visited.insert(ac, bs);
                        pairs.push((ac, bs));
                    }
                }
                _ => {
                    println!(
                        "MISMATCH at class {cls} / state {} letter {l}: derived {a:?} table {b:?}",
                        aut.name(st)
                    );
                    agree = false;
                }
            }
        }
    }
    assert!(agree, "derived table disagrees with shipped table");
    assert_eq!(reps.len(), aut.state_count(), "state count differs");
}
