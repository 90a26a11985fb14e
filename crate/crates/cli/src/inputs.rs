//! Loading inputs from files, or generating them from a seed.

use std::path::Path;

use rand::RngCore;
use tracelab::io::{read_data_file, DataFile};
use tracelab::linalg::{haar_unitary, rng_from_seed};
use tracelab::matprod::mn_rep_from_unitaries;
use tracelab::obstructions::CharacterTable;
use tracelab::{CMatrix, Error, MnMnRep, Result, Tolerance, TransferChannel, UnitaryTuple};

fn wrong_kind(path: &Path, found: &DataFile, wanted: &str) -> Error {
    Error::Parse(format!("{} holds a {}, expected {wanted}", path.display(), found.kind()))
}

/// Matrices from a matrix, unitary-tuple or matrix-unit file (all units of both families).
pub fn matrices(path: &Path) -> Result<Vec<CMatrix>> {
    Ok(match read_data_file(path)? {
        DataFile::Matrix(m) => vec![m],
        DataFile::Unitaries(t) => t.unitaries().to_vec(),
        DataFile::MnMn(r) => r.e_units().iter().chain(r.f_units()).cloned().collect(),
        other => return Err(wrong_kind(path, &other, "matrices")),
    })
}

pub fn unitaries(path: &Path) -> Result<UnitaryTuple> {
    match read_data_file(path)? {
        DataFile::Unitaries(t) => Ok(t),
        other => Err(wrong_kind(path, &other, "a unitary tuple")),
    }
}

pub fn mnmn(path: &Path) -> Result<MnMnRep> {
    match read_data_file(path)? {
        DataFile::MnMn(r) => Ok(r),
        other => Err(wrong_kind(path, &other, "a matrix-unit pair")),
    }
}

pub fn channel(path: &Path) -> Result<TransferChannel> {
    match read_data_file(path)? {
        DataFile::Channel(c) => Ok(c),
        other => Err(wrong_kind(path, &other, "a channel")),
    }
}

/// A bundled table name (`s3`, `z4`, ...) or a path to a table file.
pub fn table(name_or_path: &str) -> Result<CharacterTable> {
    let bundled = CharacterTable::<f64>::bundled_names();
    let key = name_or_path.trim_end_matches(".json").trim_end_matches(".table").to_ascii_lowercase();
    if bundled.contains(&key.as_str()) && !Path::new(name_or_path).exists() {
        return CharacterTable::bundled(&key);
    }
    if !Path::new(name_or_path).exists() {
        return Err(Error::Parse(format!("no bundled table or file named {name_or_path} (bundled: {})", bundled.join(", "))));
    }
    match read_data_file(Path::new(name_or_path))? {
        DataFile::Table(t) => Ok(t),
        other => Err(wrong_kind(Path::new(name_or_path), &other, "a character table")),
    }
}

/// Independent seeds derived from the run seed, in a fixed order.
pub struct SeedStream(rand_chacha::ChaCha8Rng);

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self(rng_from_seed(seed))
    }

    pub fn next(&mut self) -> u64 {
        self.0.next_u64()
    }
}

/// `mn_rep_from_unitaries` with `n − 1` Haar unitaries of dimension `d`.
pub fn haar_mnmn(n: usize, d: usize, seeds: &mut SeedStream, tol: &Tolerance) -> Result<MnMnRep> {
    if n < 2 || d == 0 {
        return Err(Error::Unsupported(format!("need n >= 2 and d >= 1, got n = {n}, d = {d}")));
    }
    let us: Vec<CMatrix> = (1..n).map(|_| haar_unitary(d, seeds.next())).collect();
    mn_rep_from_unitaries(n, &us, tol)
}
