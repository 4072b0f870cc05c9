//! Write an instance in the text exchange formats, read it back and recover.

use std::fs::File;
use std::io::{BufReader, BufWriter};

use obcs::io::{read_matrix, read_signal, read_signs, write_matrix, write_signal, write_signs};
use obcs::model::Instance;
use obcs::{recover, Algorithm, RecoveryOptions};

fn main() -> obcs::Result<()> {
    let dir = std::env::temp_dir().join("obcs-file-roundtrip");
    std::fs::create_dir_all(&dir)?;
    let (pa, py, px) = (dir.join("a.txt"), dir.join("y.txt"), dir.join("x.txt"));

    let inst = Instance::generate(120, 40, 3, 5)?;
    write_matrix(BufWriter::new(File::create(&pa)?), inst.ensemble.a())?;
    write_signs(BufWriter::new(File::create(&py)?), inst.ensemble.y())?;
    write_signal(BufWriter::new(File::create(&px)?), &inst.signal)?;

    let a = read_matrix(BufReader::new(File::open(&pa)?))?;
    let y = read_signs(BufReader::new(File::open(&py)?))?;
    let x = read_signal(BufReader::new(File::open(&px)?))?;
    assert_eq!(&a, inst.ensemble.a());
    assert_eq!(x.support(), inst.signal.support());

    let res = recover(Algorithm::Biht, &a, &y, &RecoveryOptions::new(x.s()))?;
    println!("files in {}", dir.display());
    println!("true support {:?}, BIHT support {:?}", x.support(), res.support);
    Ok(())
}
