//! Parity game data model, PGSolver-format I/O, sink augmentation, and
//! admissibility preprocessing.

use thiserror::Error;

use crate::valuation::Priorities;

/// Vertex identifier. Dense ids keep the graph and all per-vertex tables flat.
pub type Vertex = u32;

/// Sentinel for strategy slots that carry no choice (wrong owner, or the sink).
pub const NO_VERTEX: Vertex = u32::MAX;

/// Capacity limit: the Euler-tour list uses two `u32` element ids per vertex
/// plus two sentinels, so games (after augmentation and preprocessing) must
/// stay below half the id space.
pub(crate) const MAX_VERTICES: usize = (u32::MAX as usize - 3) / 2;

/// The two players.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Owner {
    Even,
    Odd,
}

impl Owner {
    pub fn opponent(self) -> Owner {
        match self {
            Owner::Even => Owner::Odd,
            Owner::Odd => Owner::Even,
        }
    }
}

impl std::fmt::Display for Owner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Owner::Even => write!(f, "even"),
            Owner::Odd => write!(f, "odd"),
        }
    }
}

/// An error while reading a PGSolver-format game or solution.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl ParseError {
    fn at(line: u32, col: u32, message: impl Into<String>) -> Self {
        ParseError { line, col, message: message.into() }
    }
}

/// Structural error raised when assembling a game from parts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameStructureError {
    #[error("game has no vertices")]
    Empty,
    #[error("vertex {0} has no successors")]
    NoSuccessors(Vertex),
    #[error("vertex {v} has successor {to} out of range (vertex count {n})")]
    TargetOutOfRange { v: Vertex, to: u64, n: usize },
    #[error("game too large: {0}")]
    TooLarge(String),
}

/// A parity game: vertices with an owner, a priority, and an ordered list of
/// successors. There are no terminal vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityGame {
    owner: Vec<Owner>,
    priority: Vec<u32>,
    first: Vec<u32>,
    targets: Vec<Vertex>,
    names: Vec<Option<String>>,
    domain: Priorities,
}

impl ParityGame {
    /// Assemble a game from per-vertex data, checking the structural
    /// invariants: at least one successor per vertex and all targets in range.
    pub fn from_parts(
        owner: Vec<Owner>,
        priority: Vec<u32>,
        successors: Vec<Vec<Vertex>>,
        names: Vec<Option<String>>,
    ) -> Result<Self, GameStructureError> {
        let n = owner.len();
        if n == 0 {
            return Err(GameStructureError::Empty);
        }
        assert_eq!(priority.len(), n);
        assert_eq!(successors.len(), n);
        assert_eq!(names.len(), n);
        if n >= MAX_VERTICES {
            return Err(GameStructureError::TooLarge(format!("{n} vertices")));
        }
        let edges: usize = successors.iter().map(Vec::len).sum();
        if edges as u64 >= u32::MAX as u64 {
            return Err(GameStructureError::TooLarge(format!("{edges} edges")));
        }
        let mut first = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(edges);
        first.push(0u32);
        for (v, succ) in successors.iter().enumerate() {
            if succ.is_empty() {
                return Err(GameStructureError::NoSuccessors(v as Vertex));
            }
            for &u in succ {
                if u as usize >= n {
                    return Err(GameStructureError::TargetOutOfRange { v: v as Vertex, to: u as u64, n });
                }
                targets.push(u);
            }
            first.push(targets.len() as u32);
        }
        let domain = Priorities::from_values(priority.iter().copied());
        Ok(ParityGame { owner, priority, first, targets, names, domain })
    }

    pub fn vertex_count(&self) -> usize {
        self.owner.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn owner(&self, v: Vertex) -> Owner {
        self.owner[v as usize]
    }

    pub fn priority(&self, v: Vertex) -> u32 {
        self.priority[v as usize]
    }

    pub fn successors(&self, v: Vertex) -> &[Vertex] {
        &self.targets[self.first[v as usize] as usize..self.first[v as usize + 1] as usize]
    }

    pub fn name(&self, v: Vertex) -> Option<&str> {
        self.names[v as usize].as_deref()
    }

    /// The sorted set of priorities used by the game.
    pub fn domain(&self) -> &Priorities {
        &self.domain
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.vertex_count() as Vertex
    }

    /// Render the game in PGSolver format. `parse_pgsolver` round-trips it.
    pub fn to_pgsolver(&self) -> String {
        let n = self.vertex_count();
        let mut out = String::with_capacity(16 * n);
        out.push_str(&format!("parity {};\n", n - 1));
        for v in 0..n {
            out.push_str(&format!(
                "{} {} {} ",
                v,
                self.priority[v],
                match self.owner[v] {
                    Owner::Even => 0,
                    Owner::Odd => 1,
                }
            ));
            let succ = self.successors(v as Vertex);
            for (i, u) in succ.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&u.to_string());
            }
            if let Some(name) = &self.names[v] {
                out.push_str(&format!(" \"{name}\""));
            }
            out.push_str(";\n");
        }
        out
    }
}

/// The game extended with a sink vertex: every Even vertex gains one edge to
/// the sink, appended after its original successors. Preprocessing may also
/// insert priority-0 Even vertices that subdivide Odd-to-Odd edges; those keep
/// a record of the original edge target so strategies can be mapped back.
#[derive(Debug, Clone)]
pub struct AugmentedGame {
    base: ParityGame,
    sink: Vertex,
    owner: Vec<Owner>,
    priority: Vec<u32>,
    first: Vec<u32>,
    targets: Vec<Vertex>,
    /// Rank of each vertex's priority in the base domain; `None` encoded as
    /// `u32::MAX` for priorities the base game does not use (sink, inserted).
    pri_rank: Vec<u32>,
    /// For inserted vertex `base_vertices() + 1 + k`, the original edge target.
    inserted_target: Vec<Vertex>,
}

pub(crate) const NO_RANK: u32 = u32::MAX;

impl AugmentedGame {
    pub fn base(&self) -> &ParityGame {
        &self.base
    }

    /// Vertex count of the original game.
    pub fn base_vertices(&self) -> usize {
        self.base.vertex_count()
    }

    /// Vertex count including the sink and inserted vertices.
    pub fn total_vertices(&self) -> usize {
        self.owner.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn sink(&self) -> Vertex {
        self.sink
    }

    pub fn owner(&self, v: Vertex) -> Owner {
        self.owner[v as usize]
    }

    pub fn priority(&self, v: Vertex) -> u32 {
        self.priority[v as usize]
    }

    /// Rank of `priority(v)` in the base domain, or `None` when the base game
    /// never uses it (then the vertex contributes nothing to valuations).
    pub fn priority_rank(&self, v: Vertex) -> Option<usize> {
        match self.pri_rank[v as usize] {
            NO_RANK => None,
            r => Some(r as usize),
        }
    }

    pub fn successors(&self, v: Vertex) -> &[Vertex] {
        &self.targets[self.first[v as usize] as usize..self.first[v as usize + 1] as usize]
    }

    pub fn domain(&self) -> &Priorities {
        self.base.domain()
    }

    pub fn is_inserted(&self, v: Vertex) -> bool {
        v as usize > self.sink as usize
    }

    pub fn inserted_count(&self) -> usize {
        self.inserted_target.len()
    }

    /// Map a strategy target back to an original vertex: inserted vertices
    /// stand for the target of the edge they subdivide.
    pub fn original_target(&self, v: Vertex) -> Vertex {
        if self.is_inserted(v) {
            self.inserted_target[v as usize - self.sink as usize - 1]
        } else {
            v
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.total_vertices() as Vertex
    }

    /// The largest set U of Odd vertices in which every vertex has a successor
    /// inside U, computed by iterated removal. U is nonempty exactly when the
    /// graph (sink edges aside) has a cycle consisting solely of Odd vertices.
    pub fn odd_only_region(&self) -> Vec<bool> {
        let n = self.total_vertices();
        let mut in_u = vec![false; n];
        let mut count = vec![0u32; n];
        for v in self.vertices() {
            if self.owner(v) == Owner::Odd {
                in_u[v as usize] = true;
            }
        }
        // count[v] = successors of v currently in U.
        for v in self.vertices() {
            if in_u[v as usize] {
                count[v as usize] = self
                    .successors(v)
                    .iter()
                    .filter(|&&u| in_u[u as usize])
                    .count() as u32;
            }
        }
        let mut queue: Vec<Vertex> = self
            .vertices()
            .filter(|&v| in_u[v as usize] && count[v as usize] == 0)
            .collect();
        // Reverse edges among Odd vertices, needed to propagate removals.
        let mut rev_count = vec![0u32; n];
        for v in self.vertices() {
            if in_u[v as usize] {
                for &u in self.successors(v) {
                    if in_u[u as usize] {
                        rev_count[u as usize] += 1;
                    }
                }
            }
        }
        let mut rev_first = vec![0u32; n + 1];
        for v in 0..n {
            rev_first[v + 1] = rev_first[v] + rev_count[v];
        }
        let mut rev_targets = vec![0 as Vertex; rev_first[n] as usize];
        let mut cursor = rev_first.clone();
        for v in self.vertices() {
            if in_u[v as usize] {
                for &u in self.successors(v) {
                    if in_u[u as usize] {
                        rev_targets[cursor[u as usize] as usize] = v;
                        cursor[u as usize] += 1;
                    }
                }
            }
        }
        while let Some(v) = queue.pop() {
            in_u[v as usize] = false;
            for i in rev_first[v as usize]..rev_first[v as usize + 1] {
                let p = rev_targets[i as usize];
                if in_u[p as usize] {
                    count[p as usize] -= 1;
                    if count[p as usize] == 0 {
                        queue.push(p);
                    }
                }
            }
        }
        in_u
    }
}

/// Add the sink. Each Even vertex gains one edge to the sink, appended after
/// its original successors; Odd vertices are unchanged; the sink has no
/// outgoing edges and its priority 0 is kept out of the valuation domain.
pub fn augment_with_sink(base: ParityGame) -> AugmentedGame {
    let n = base.vertex_count();
    let sink = n as Vertex;
    let total = n + 1;
    let mut owner = Vec::with_capacity(total);
    let mut priority = Vec::with_capacity(total);
    let mut first = Vec::with_capacity(total + 1);
    let even_count = base.owner.iter().filter(|&&o| o == Owner::Even).count();
    let mut targets = Vec::with_capacity(base.edge_count() + even_count);
    first.push(0u32);
    for v in 0..n {
        owner.push(base.owner[v]);
        priority.push(base.priority[v]);
        targets.extend_from_slice(base.successors(v as Vertex));
        if base.owner[v] == Owner::Even {
            targets.push(sink);
        }
        first.push(targets.len() as u32);
    }
    // The sink: no outgoing edges, never part of the domain.
    owner.push(Owner::Even);
    priority.push(0);
    first.push(targets.len() as u32);

    let pri_rank = priority
        .iter()
        .enumerate()
        .map(|(v, &p)| {
            if v == sink as usize {
                NO_RANK
            } else {
                base.domain().rank_of(p).map_or(NO_RANK, |r| r as u32)
            }
        })
        .collect();

    AugmentedGame {
        base,
        sink,
        owner,
        priority,
        first,
        targets,
        pri_rank,
        inserted_target: Vec::new(),
    }
}

/// Subdivide every edge that connects two vertices of the odd-only region
/// with a fresh priority-0 Even vertex whose successors are the original
/// target and the sink. Afterwards no cycle of the game consists solely of
/// Odd vertices. Returns the game and the number of inserted vertices.
pub fn preprocess_admissible(g: AugmentedGame) -> (AugmentedGame, usize) {
    let in_u = g.odd_only_region();
    if !in_u.iter().any(|&b| b) {
        return (g, 0);
    }
    let old_total = g.total_vertices();
    let sink = g.sink();
    // One fresh vertex per U-internal edge.
    let inserted: usize = g
        .vertices()
        .filter(|&v| in_u[v as usize])
        .map(|v| g.successors(v).iter().filter(|&&u| in_u[u as usize]).count())
        .sum();
    let total = old_total + inserted;
    assert!(total <= MAX_VERTICES, "preprocessed game exceeds the vertex capacity");
    let mut owner = g.owner.clone();
    let mut priority = g.priority.clone();
    let mut pri_rank = g.pri_rank.clone();
    let mut inserted_target = g.inserted_target.clone();
    let mut first = Vec::with_capacity(total + 1);
    let mut targets = Vec::with_capacity(g.edge_count() + 2 * inserted);
    let mut next_id = old_total as Vertex;
    let mut fresh: Vec<(Vertex, Vertex)> = Vec::with_capacity(inserted); // (id, original target)
    first.push(0u32);
    for v in g.vertices() {
        if in_u[v as usize] {
            for &u in g.successors(v) {
                if in_u[u as usize] {
                    fresh.push((next_id, u));
                    targets.push(next_id);
                    next_id += 1;
                } else {
                    targets.push(u);
                }
            }
        } else {
            targets.extend_from_slice(g.successors(v));
        }
        first.push(targets.len() as u32);
    }
    for &(_, orig) in &fresh {
        owner.push(Owner::Even);
        priority.push(0);
        pri_rank.push(g.base.domain().rank_of(0).map_or(NO_RANK, |r| r as u32));
        inserted_target.push(orig);
        targets.push(orig);
        targets.push(sink);
        first.push(targets.len() as u32);
    }
    let out = AugmentedGame {
        base: g.base,
        sink,
        owner,
        priority,
        first,
        targets,
        pri_rank,
        inserted_target,
    };
    debug_assert!(!out.odd_only_region().iter().any(|&b| b));
    (out, inserted)
}

// ---------------------------------------------------------------------------
// PGSolver format
// ---------------------------------------------------------------------------

struct Scanner<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Scanner { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn at_eof(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn here(&self) -> (u32, u32) {
        (self.line, self.col)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r' | b'\n')) {
            self.bump();
        }
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        ParseError::at(self.line, self.col, message)
    }

    /// Consume `word` if it appears here followed by a non-word byte.
    fn try_keyword(&mut self, word: &str) -> bool {
        let w = word.as_bytes();
        if self.src[self.pos..].starts_with(w) {
            let after = self.src.get(self.pos + w.len());
            if after.is_none_or(|b| !b.is_ascii_alphanumeric()) {
                for _ in 0..w.len() {
                    self.bump();
                }
                return true;
            }
        }
        false
    }

    fn read_uint(&mut self) -> Result<u64, ParseError> {
        match self.peek() {
            Some(b) if b.is_ascii_digit() => {}
            _ => return Err(self.error_here("expected a number")),
        }
        let mut value: u64 = 0;
        while let Some(b) = self.peek() {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as u64))
                .ok_or_else(|| self.error_here("number too large"))?;
            self.bump();
        }
        Ok(value)
    }

    fn expect_byte(&mut self, expected: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(b) if b == expected => {
                self.bump();
                Ok(())
            }
            _ => Err(self.error_here(format!("expected '{}'", expected as char))),
        }
    }

    fn read_quoted(&mut self) -> Result<String, ParseError> {
        self.expect_byte(b'"')?;
        let mut bytes = Vec::new();
        loop {
            match self.bump() {
                Some(b'"') => {
                    return String::from_utf8(bytes)
                        .map_err(|_| self.error_here("name is not valid UTF-8"));
                }
                Some(b) => bytes.push(b),
                None => return Err(self.error_here("unterminated quoted name")),
            }
        }
    }
}

struct RawRecord {
    id: u64,
    priority: u64,
    owner: u8,
    successors: Vec<u64>,
    name: Option<String>,
    line: u32,
    col: u32,
}

fn parse_records(sc: &mut Scanner<'_>, keyword: &str) -> Result<(Option<u64>, Vec<RawRecord>), ParseError> {
    sc.skip_ws();
    let mut declared = None;
    if sc.try_keyword(keyword) {
        sc.skip_ws();
        declared = Some(sc.read_uint()?);
        sc.skip_ws();
        sc.expect_byte(b';')?;
    }
    let mut records = Vec::new();
    loop {
        sc.skip_ws();
        if sc.at_eof() {
            break;
        }
        let (line, col) = sc.here();
        let id = sc.read_uint()?;
        sc.skip_ws();
        let priority = sc.read_uint()?;
        sc.skip_ws();
        let (oline, ocol) = sc.here();
        let owner = sc.read_uint()?;
        if owner > 1 {
            return Err(ParseError::at(oline, ocol, format!("owner must be 0 or 1, got {owner}")));
        }
        sc.skip_ws();
        if sc.peek() == Some(b';') {
            return Err(sc.error_here("empty successor list"));
        }
        let mut successors = vec![sc.read_uint()?];
        loop {
            sc.skip_ws();
            if sc.peek() == Some(b',') {
                sc.bump();
                sc.skip_ws();
                successors.push(sc.read_uint()?);
            } else {
                break;
            }
        }
        sc.skip_ws();
        let name = if sc.peek() == Some(b'"') { Some(sc.read_quoted()?) } else { None };
        sc.skip_ws();
        sc.expect_byte(b';')?;
        records.push(RawRecord { id, priority, owner: owner as u8, successors, name, line, col });
    }
    Ok((declared, records))
}

/// Parse a game in PGSolver format: an optional `parity <maxid>;` header, then
/// one `<id> <priority> <owner> <succ>,<succ>,... ["name"];` record per
/// vertex, with owner 0 for Even and 1 for Odd. Every id in `0..=maxid` must
/// be defined exactly once; successor order is preserved as written.
pub fn parse_pgsolver(text: &str) -> Result<ParityGame, ParseError> {
    let mut sc = Scanner::new(text);
    let (declared, records) = parse_records(&mut sc, "parity")?;
    let end = sc.here();
    if records.is_empty() {
        return Err(ParseError::at(end.0, end.1, "game defines no vertices"));
    }
    let max_seen = records.iter().map(|r| r.id).max().unwrap();
    let max_id = match declared {
        Some(d) => {
            if let Some(r) = records.iter().find(|r| r.id > d) {
                return Err(ParseError::at(
                    r.line,
                    r.col,
                    format!("vertex id {} exceeds declared maximum {d}", r.id),
                ));
            }
            d
        }
        None => max_seen,
    };
    if max_id >= MAX_VERTICES as u64 {
        return Err(ParseError::at(1, 1, format!("vertex id {max_id} too large")));
    }
    let n = (max_id + 1) as usize;
    let mut slots: Vec<Option<RawRecord>> = (0..n).map(|_| None).collect();
    for r in records {
        let idx = r.id as usize;
        if slots[idx].is_some() {
            return Err(ParseError::at(r.line, r.col, format!("vertex {} defined twice", r.id)));
        }
        slots[idx] = Some(r);
    }
    let mut owner = Vec::with_capacity(n);
    let mut priority = Vec::with_capacity(n);
    let mut successors = Vec::with_capacity(n);
    let mut names = Vec::with_capacity(n);
    for (idx, slot) in slots.into_iter().enumerate() {
        let r = slot.ok_or_else(|| {
            ParseError::at(end.0, end.1, format!("vertex {idx} is not defined"))
        })?;
        if r.priority > u32::MAX as u64 {
            return Err(ParseError::at(r.line, r.col, format!("priority {} too large", r.priority)));
        }
        let mut succ = Vec::with_capacity(r.successors.len());
        for &u in &r.successors {
            if u > max_id {
                return Err(ParseError::at(
                    r.line,
                    r.col,
                    format!("successor {u} out of range (max vertex id {max_id})"),
                ));
            }
            succ.push(u as Vertex);
        }
        owner.push(if r.owner == 0 { Owner::Even } else { Owner::Odd });
        priority.push(r.priority as u32);
        successors.push(succ);
        names.push(r.name);
    }
    ParityGame::from_parts(owner, priority, successors, names)
        .map_err(|e| ParseError::at(end.0, end.1, e.to_string()))
}

/// Render a winning partition with strategies in PGSolver solution format:
/// `paritysol <maxid>;` then `<id> <winner 0|1> [<strategy-successor>];`, the
/// strategy field present only for vertices owned by their winner.
pub fn write_solution_text(winner: &[Owner], strategy: &[Option<Vertex>]) -> String {
    assert_eq!(winner.len(), strategy.len());
    let n = winner.len();
    let mut out = String::with_capacity(8 * n);
    out.push_str(&format!("paritysol {};\n", n - 1));
    for v in 0..n {
        let w = match winner[v] {
            Owner::Even => 0,
            Owner::Odd => 1,
        };
        match strategy[v] {
            Some(u) => out.push_str(&format!("{v} {w} {u};\n")),
            None => out.push_str(&format!("{v} {w};\n")),
        }
    }
    out
}

/// Parse a solution file, returning per-vertex winners and strategy choices.
pub fn parse_solution_text(text: &str) -> Result<(Vec<Owner>, Vec<Option<Vertex>>), ParseError> {
    let mut sc = Scanner::new(text);
    sc.skip_ws();
    if !sc.try_keyword("paritysol") {
        return Err(sc.error_here("expected 'paritysol' header"));
    }
    sc.skip_ws();
    let max_id = sc.read_uint()?;
    sc.skip_ws();
    sc.expect_byte(b';')?;
    if max_id >= MAX_VERTICES as u64 {
        return Err(ParseError::at(1, 1, format!("vertex id {max_id} too large")));
    }
    let n = (max_id + 1) as usize;
    let mut winner: Vec<Option<Owner>> = vec![None; n];
    let mut strategy: Vec<Option<Vertex>> = vec![None; n];
    loop {
        sc.skip_ws();
        if sc.at_eof() {
            break;
        }
        let (line, col) = sc.here();
        let id = sc.read_uint()?;
        if id > max_id {
            return Err(ParseError::at(line, col, format!("vertex id {id} exceeds declared maximum {max_id}")));
        }
        sc.skip_ws();
        let (wline, wcol) = sc.here();
        let w = sc.read_uint()?;
        if w > 1 {
            return Err(ParseError::at(wline, wcol, format!("winner must be 0 or 1, got {w}")));
        }
        sc.skip_ws();
        let choice = if sc.peek().is_some_and(|b| b.is_ascii_digit()) {
            let u = sc.read_uint()?;
            if u > max_id {
                return Err(ParseError::at(line, col, format!("strategy target {u} out of range")));
            }
            Some(u as Vertex)
        } else {
            None
        };
        sc.skip_ws();
        sc.expect_byte(b';')?;
        if winner[id as usize].is_some() {
            return Err(ParseError::at(line, col, format!("vertex {id} defined twice")));
        }
        winner[id as usize] = Some(if w == 0 { Owner::Even } else { Owner::Odd });
        strategy[id as usize] = choice;
    }
    let end = sc.here();
    let mut winners = Vec::with_capacity(n);
    for (v, w) in winner.into_iter().enumerate() {
        winners.push(w.ok_or_else(|| ParseError::at(end.0, end.1, format!("vertex {v} is not defined")))?);
    }
    Ok((winners, strategy))
}
