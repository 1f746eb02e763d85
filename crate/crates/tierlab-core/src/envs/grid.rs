//! ASCII grid worlds.
//!
//! Cell codes: `S` start, `G` goal, `L` lava, `#` wall, `.` background.
//! Flags are `1`..`9` (picked up in numeric order) or `F` (picked up in
//! row-major order); the two notations cannot be mixed. With flags present a
//! state is `(cell, flags collected)` and the goal only absorbs once every
//! flag is held.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mdp::{TierMdp, TierMdpParts};

/// How intended moves get perturbed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dynamics {
    /// Intended direction with `p_succeed`, each perpendicular with `p_each_side`.
    SlipSides {
        p_succeed: f64,
        p_each_side: f64,
    },
    /// Intended direction with `p_succeed`; otherwise (`p_random`) a uniformly
    /// random action from the whole action set.
    UniformRandom {
        p_succeed: f64,
        p_random: f64,
    },
    /// Intended direction with `p_succeed`, the opposite one otherwise.
    Opposite {
        p_succeed: f64,
    },
    Deterministic,
}

impl Dynamics {
    fn total(&self) -> f64 {
        match *self {
            Dynamics::SlipSides {
                p_succeed,
                p_each_side,
            } => p_succeed + 2.0 * p_each_side,
            Dynamics::UniformRandom {
                p_succeed,
                p_random,
            } => p_succeed + p_random,
            Dynamics::Opposite { .. } | Dynamics::Deterministic => 1.0,
        }
    }

    fn probabilities(&self) -> impl Iterator<Item = f64> {
        let v: [f64; 2] = match *self {
            Dynamics::SlipSides {
                p_succeed,
                p_each_side,
            } => [p_succeed, p_each_side],
            Dynamics::UniformRandom {
                p_succeed,
                p_random,
            } => [p_succeed, p_random],
            Dynamics::Opposite { p_succeed } => [p_succeed, 1.0 - p_succeed],
            Dynamics::Deterministic => [1.0, 0.0],
        };
        v.into_iter()
    }
}

/// Which moves the agent has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionSet {
    /// Up, Right, Down, Left (action indices 0..4).
    Cardinal4,
    /// Left, Right (action indices 0..2).
    Horizontal2,
}

impl ActionSet {
    pub fn len(self) -> usize {
        match self {
            ActionSet::Cardinal4 => 4,
            ActionSet::Horizontal2 => 2,
        }
    }

    pub fn is_empty(self) -> bool {
        false
    }

    /// Row/column offset of an action.
    pub fn offset(self, a: usize) -> (isize, isize) {
        match (self, a) {
            (ActionSet::Cardinal4, 0) => (-1, 0),
            (ActionSet::Cardinal4, 1) => (0, 1),
            (ActionSet::Cardinal4, 2) => (1, 0),
            (ActionSet::Cardinal4, _) => (0, -1),
            (ActionSet::Horizontal2, 0) => (0, -1),
            (ActionSet::Horizontal2, _) => (0, 1),
        }
    }

    pub fn name(self, a: usize) -> &'static str {
        match (self, a) {
            (ActionSet::Cardinal4, 0) => "up",
            (ActionSet::Cardinal4, 1) => "right",
            (ActionSet::Cardinal4, 2) => "down",
            (ActionSet::Cardinal4, _) => "left",
            (ActionSet::Horizontal2, 0) => "left",
            (ActionSet::Horizontal2, _) => "right",
        }
    }

    fn opposite(self, a: usize) -> usize {
        match self {
            ActionSet::Cardinal4 => (a + 2) % 4,
            ActionSet::Horizontal2 => 1 - a,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub name: String,
    pub map: String,
    pub dynamics: Dynamics,
    pub actions: ActionSet,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Start,
    Goal,
    Lava,
    Wall,
    Background,
    /// Flag with 1-based pickup order.
    Flag(usize),
}

/// A state of a parsed grid: a cell plus the number of flags held.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct GridState {
    pub row: usize,
    pub col: usize,
    pub flags: usize,
}

/// A parsed grid with its transition structure; tiers are assigned later.
#[derive(Debug, Clone)]
pub struct GridWorld {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<Vec<Cell>>,
    pub states: Vec<GridState>,
    pub n_flags: usize,
    pub actions: ActionSet,
    pub(crate) transitions: Vec<Vec<(usize, f64)>>,
    pub(crate) absorbing: Vec<bool>,
    pub(crate) start: usize,
    pub(crate) gamma: f64,
}

fn perr(row: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::MapParse {
        row,
        col,
        msg: msg.into(),
    }
}

fn parse_cells(map: &str) -> Result<Vec<Vec<Cell>>> {
    let lines: Vec<&str> = map
        .lines()
        .map(str::trim_end)
        .filter(|l| !l.is_empty())
        .collect();
    if lines.is_empty() {
        return Err(perr(0, 0, "empty map"));
    }
    let width = lines[0].chars().count();
    let mut cells = Vec::with_capacity(lines.len());
    let (mut digits, mut letters) = (Vec::new(), Vec::new());
    for (r, line) in lines.iter().enumerate() {
        if line.chars().count() != width {
            return Err(perr(
                r,
                line.chars().count().min(width),
                format!("row length differs from first row ({width})"),
            ));
        }
        let mut row = Vec::with_capacity(width);
        for (c, ch) in line.chars().enumerate() {
            row.push(match ch {
                'S' => Cell::Start,
                'G' => Cell::Goal,
                'L' => Cell::Lava,
                '#' => Cell::Wall,
                '.' => Cell::Background,
                'F' => {
                    letters.push((r, c));
                    Cell::Flag(0)
                }
                '1'..='9' => {
                    let n = ch as usize - '0' as usize;
                    digits.push((n, r, c));
                    Cell::Flag(n)
                }
                other => return Err(perr(r, c, format!("unknown cell code `{other}`"))),
            });
        }
        cells.push(row);
    }
    if !digits.is_empty() && !letters.is_empty() {
        let (r, c) = letters[0];
        return Err(perr(r, c, "cannot mix `F` and numbered flags"));
    }
    for (i, &(r, c)) in letters.iter().enumerate() {
        cells[r][c] = Cell::Flag(i + 1);
    }
    digits.sort();
    for (i, &(n, r, c)) in digits.iter().enumerate() {
        if n != i + 1 {
            return Err(perr(
                r,
                c,
                format!("flag {n} out of sequence, expected {}", i + 1),
            ));
        }
    }
    Ok(cells)
}

fn find(cells: &[Vec<Cell>], want: Cell) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (r, row) in cells.iter().enumerate() {
        for (c, &cell) in row.iter().enumerate() {
            if cell == want {
                out.push((r, c));
            }
        }
    }
    out
}

impl GridWorld {
    /// Parses a map and builds the transition structure over reachable states.
    pub fn parse(spec: &GridSpec) -> Result<GridWorld> {
        if (spec.dynamics.total() - 1.0).abs() > 1e-12
            || spec
                .dynamics
                .probabilities()
                .any(|p| !(0.0..=1.0).contains(&p))
        {
            return Err(Error::InvalidParameter(format!(
                "dynamics probabilities must sum to 1: {:?}",
                spec.dynamics
            )));
        }
        if matches!(spec.dynamics, Dynamics::SlipSides { p_each_side, .. } if p_each_side > 0.0)
            && spec.actions == ActionSet::Horizontal2
        {
            return Err(Error::InvalidParameter(
                "sideways slips need the four-direction action set".to_string(),
            ));
        }
        let cells = parse_cells(&spec.map)?;
        let starts = find(&cells, Cell::Start);
        match starts.len() {
            1 => {}
            0 => return Err(perr(0, 0, "no start cell `S`")),
            _ => {
                return Err(perr(
                    starts[1].0,
                    starts[1].1,
                    "more than one start cell `S`",
                ))
            }
        }
        if find(&cells, Cell::Goal).is_empty() {
            return Err(perr(0, 0, "no goal cell `G`"));
        }
        let rows = cells.len();
        let cols = cells[0].len();
        let n_flags = cells
            .iter()
            .flatten()
            .filter(|c| matches!(c, Cell::Flag(_)))
            .count();

        let mut world = GridWorld {
            name: spec.name.clone(),
            rows,
            cols,
            cells,
            states: Vec::new(),
            n_flags,
            actions: spec.actions,
            transitions: Vec::new(),
            absorbing: Vec::new(),
            start: 0,
            gamma: spec.gamma,
        };
        world.build(starts[0], spec.dynamics);
        Ok(world)
    }

    pub fn cell(&self, row: usize, col: usize) -> Cell {
        self.cells[row][col]
    }

    fn is_absorbing_state(&self, st: GridState) -> bool {
        match self.cells[st.row][st.col] {
            Cell::Lava => true,
            Cell::Goal => st.flags == self.n_flags,
            _ => false,
        }
    }

    fn step(&self, st: GridState, dir: usize) -> GridState {
        let (dr, dc) = self.actions.offset(dir);
        let (r, c) = (st.row as isize + dr, st.col as isize + dc);
        let off_grid = r < 0 || c < 0 || r >= self.rows as isize || c >= self.cols as isize;
        let (row, col) = if off_grid || self.cells[r as usize][c as usize] == Cell::Wall {
            (st.row, st.col)
        } else {
            (r as usize, c as usize)
        };
        let flags = match self.cells[row][col] {
            Cell::Flag(n) if n == st.flags + 1 => n,
            _ => st.flags,
        };
        GridState { row, col, flags }
    }

    /// Distribution over effective directions for intended action `a`.
    fn outcomes(&self, a: usize, dynamics: Dynamics) -> Vec<(usize, f64)> {
        let n = self.actions.len();
        let mut out: Vec<(usize, f64)> = Vec::new();
        let mut add = |d: usize, p: f64| {
            if p <= 0.0 {
                return;
            }
            match out.iter_mut().find(|(x, _)| *x == d) {
                Some(e) => e.1 += p,
                None => out.push((d, p)),
            }
        };
        match dynamics {
            Dynamics::Deterministic => add(a, 1.0),
            Dynamics::SlipSides {
                p_succeed,
                p_each_side,
            } => {
                add(a, p_succeed);
                add((a + 1) % 4, p_each_side);
                add((a + 3) % 4, p_each_side);
            }
            Dynamics::UniformRandom {
                p_succeed,
                p_random,
            } => {
                add(a, p_succeed);
                for d in 0..n {
                    add(d, p_random / n as f64);
                }
            }
            Dynamics::Opposite { p_succeed } => {
                add(a, p_succeed);
                add(self.actions.opposite(a), 1.0 - p_succeed);
            }
        }
        out
    }

    fn build(&mut self, (sr, sc): (usize, usize), dynamics: Dynamics) {
        let n_actions = self.actions.len();
        let start = GridState {
            row: sr,
            col: sc,
            flags: 0,
        };
        let outcomes: Vec<Vec<(usize, f64)>> =
            (0..n_actions).map(|a| self.outcomes(a, dynamics)).collect();
        // BFS over reachable states; index order = discovery order
        let mut index: alloc::collections::BTreeMap<GridState, usize> =
            alloc::collections::BTreeMap::new();
        let mut order = vec![start];
        index.insert(start, 0);
        let mut queue = VecDeque::from([start]);
        while let Some(st) = queue.pop_front() {
            if self.is_absorbing_state(st) {
                continue;
            }
            for d in 0..n_actions {
                let nx = self.step(st, d);
                if let alloc::collections::btree_map::Entry::Vacant(e) = index.entry(nx) {
                    e.insert(order.len());
                    order.push(nx);
                    queue.push_back(nx);
                }
            }
        }
        let mut transitions = Vec::with_capacity(order.len() * n_actions);
        let mut absorbing = Vec::with_capacity(order.len());
        for (i, &st) in order.iter().enumerate() {
            let abs = self.is_absorbing_state(st);
            absorbing.push(abs);
            for a in 0..n_actions {
                if abs {
                    transitions.push(vec![(i, 1.0)]);
                    continue;
                }
                let mut row: Vec<(usize, f64)> = Vec::new();
                for &(d, p) in &outcomes[a] {
                    let j = index[&self.step(st, d)];
                    match row.iter_mut().find(|(x, _)| *x == j) {
                        Some(e) => e.1 += p,
                        None => row.push((j, p)),
                    }
                }
                transitions.push(row);
            }
        }
        self.states = order;
        self.transitions = transitions;
        self.absorbing = absorbing;
        self.start = 0;
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn is_absorbing(&self, s: usize) -> bool {
        self.absorbing[s]
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn has_lava(&self) -> bool {
        self.cells.iter().flatten().any(|&c| c == Cell::Lava)
    }

    /// State index of a cell with a given flag count.
    pub fn state_index(&self, row: usize, col: usize, flags: usize) -> Option<usize> {
        self.states
            .iter()
            .position(|s| *s == GridState { row, col, flags })
    }

    /// Builds a tier MDP from explicit labels.
    pub fn to_mdp(&self, tier_of: Vec<usize>, k: usize, goal_obstacle: bool) -> Result<TierMdp> {
        TierMdp::new(TierMdpParts {
            n_states: self.n_states(),
            n_actions: self.actions.len(),
            rows: self.transitions.clone(),
            tier_of,
            k,
            gamma: self.gamma,
            absorbing: self.absorbing.clone(),
            start: self.start,
            goal_obstacle,
        })
    }
}
