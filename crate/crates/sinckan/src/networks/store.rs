//! Named, flat parameter arrays with shape metadata, plus the binary
//! container format used for parameter snapshots.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// One trainable array: row-major data plus its shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Array {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl Array {
    pub fn zeros(shape: &[usize]) -> Self {
        let len = shape.iter().product();
        Array { shape: shape.to_vec(), data: vec![0.0; len] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// Flat, named collection of trainable arrays for one network. Iteration
/// order is insertion order and is part of the determinism contract: init,
/// optimizer steps, and serialization all walk arrays in this order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamStore {
    arrays: Vec<(String, Array)>,
}

impl ParamStore {
    pub fn new() -> Self {
        ParamStore::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, array: Array) {
        let name = name.into();
        debug_assert!(
            self.position(&name).is_none(),
            "duplicate parameter array {name}"
        );
        self.arrays.push((name, array));
    }

    fn position(&self, name: &str) -> Option<usize> {
        self.arrays.iter().position(|(n, _)| n == name)
    }

    pub fn get(&self, name: &str) -> Result<&Array> {
        self.position(name).map(|i| &self.arrays[i].1).ok_or_else(|| Error::UnknownName {
            name: name.to_string(),
            known: self.names().collect::<Vec<_>>().join(", "),
        })
    }

    pub fn get_mut(&mut self, name: &str) -> Result<&mut Array> {
        match self.position(name) {
            Some(i) => Ok(&mut self.arrays[i].1),
            None => Err(Error::UnknownName {
                name: name.to_string(),
                known: self.names().collect::<Vec<_>>().join(", "),
            }),
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.arrays.iter().map(|(n, _)| n.as_str())
    }

    /// Positional access for hot paths; order is insertion order. Callers
    /// validate layout against the network's shape list first.
    #[inline]
    pub fn array_at(&self, i: usize) -> &Array {
        &self.arrays[i].1
    }

    #[inline]
    pub fn array_at_mut(&mut self, i: usize) -> &mut Array {
        &mut self.arrays[i].1
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Array)> {
        self.arrays.iter().map(|(n, a)| (n.as_str(), a))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&str, &mut Array)> {
        self.arrays.iter_mut().map(|(n, a)| (n.as_str(), a))
    }

    pub fn num_arrays(&self) -> usize {
        self.arrays.len()
    }

    /// Total number of trainable scalars.
    pub fn param_count(&self) -> usize {
        self.arrays.iter().map(|(_, a)| a.len()).sum()
    }

    /// A store with the same names and shapes, all zeros.
    pub fn zeros_like(&self) -> Self {
        ParamStore {
            arrays: self
                .arrays
                .iter()
                .map(|(n, a)| (n.clone(), Array::zeros(&a.shape)))
                .collect(),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.arrays.iter().all(|(_, a)| a.data.iter().all(|v| v.is_finite()))
    }

    /// Checks that `other` has identical names and shapes in the same order.
    pub fn same_layout(&self, other: &Self) -> bool {
        self.arrays.len() == other.arrays.len()
            && self
                .arrays
                .iter()
                .zip(other.arrays.iter())
                .all(|((n1, a1), (n2, a2))| n1 == n2 && a1.shape == a2.shape)
    }
}

const MAGIC: &[u8; 8] = b"SKPARAM1";
const FORMAT_VERSION: u32 = 1;

impl ParamStore {
    /// Serialize into the flat binary container: a versioned header followed
    /// by named little-endian f64 arrays.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e: std::io::Error| Error::io("params.write", e.to_string());
        w.write_all(MAGIC).map_err(io)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes()).map_err(io)?;
        w.write_all(&(self.arrays.len() as u32).to_le_bytes()).map_err(io)?;
        for (name, array) in &self.arrays {
            let bytes = name.as_bytes();
            w.write_all(&(bytes.len() as u32).to_le_bytes()).map_err(io)?;
            w.write_all(bytes).map_err(io)?;
            w.write_all(&(array.shape.len() as u32).to_le_bytes()).map_err(io)?;
            for &d in &array.shape {
                w.write_all(&(d as u64).to_le_bytes()).map_err(io)?;
            }
            for &v in &array.data {
                w.write_all(&v.to_le_bytes()).map_err(io)?;
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let io = |e: std::io::Error| Error::io("params.read", e.to_string());
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != MAGIC {
            return Err(Error::io("params.read", "bad magic; not a parameter container"));
        }
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf).map_err(io)?;
        let version = u32::from_le_bytes(u32buf);
        if version != FORMAT_VERSION {
            return Err(Error::io("params.read", format!("unsupported version {version}")));
        }
        r.read_exact(&mut u32buf).map_err(io)?;
        let count = u32::from_le_bytes(u32buf) as usize;
        let mut store = ParamStore::new();
        for _ in 0..count {
            r.read_exact(&mut u32buf).map_err(io)?;
            let name_len = u32::from_le_bytes(u32buf) as usize;
            let mut name = vec![0u8; name_len];
            r.read_exact(&mut name).map_err(io)?;
            let name = String::from_utf8(name)
                .map_err(|e| Error::io("params.read", e.to_string()))?;
            r.read_exact(&mut u32buf).map_err(io)?;
            let rank = u32::from_le_bytes(u32buf) as usize;
            let mut shape = Vec::with_capacity(rank);
            let mut u64buf = [0u8; 8];
            for _ in 0..rank {
                r.read_exact(&mut u64buf).map_err(io)?;
                shape.push(u64::from_le_bytes(u64buf) as usize);
            }
            let len: usize = shape.iter().product();
            let mut data = Vec::with_capacity(len);
            for _ in 0..len {
                r.read_exact(&mut u64buf).map_err(io)?;
                data.push(f64::from_le_bytes(u64buf));
            }
            store.insert(name, Array { shape, data });
        }
        Ok(store)
    }

    /// Human-readable manifest of array names and shapes, one per line.
    pub fn manifest(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("format=SKPARAM version={FORMAT_VERSION} byte_order=little-endian\n"));
        for (name, array) in &self.arrays {
            let dims: Vec<String> = array.shape.iter().map(|d| d.to_string()).collect();
            out.push_str(&format!("{name} shape=({}) count={}\n", dims.join(","), array.len()));
        }
        out
    }

    pub fn save(&self, bin_path: &Path, manifest_path: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::io("params.save", e.to_string());
        let file = std::fs::File::create(bin_path).map_err(io)?;
        self.write_binary(std::io::BufWriter::new(file))?;
        std::fs::write(manifest_path, self.manifest()).map_err(io)?;
        Ok(())
    }

    pub fn load(bin_path: &Path) -> Result<Self> {
        let io = |e: std::io::Error| Error::io("params.load", e.to_string());
        let file = std::fs::File::open(bin_path).map_err(io)?;
        Self::read_binary(std::io::BufReader::new(file))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_store() -> ParamStore {
        let mut s = ParamStore::new();
        s.insert("l0.w", Array { shape: vec![2, 3], data: vec![1.0, -2.5, 0.0, 3.25, 1e-300, f64::MIN_POSITIVE] });
        s.insert("l0.b", Array { shape: vec![3], data: vec![0.5, -0.5, 42.0] });
        s
    }

    #[test]
    fn binary_round_trip() {
        let store = sample_store();
        let mut buf = Vec::new();
        store.write_binary(&mut buf).unwrap();
        let back = ParamStore::read_binary(buf.as_slice()).unwrap();
        assert_eq!(store, back);
    }

    #[test]
    fn rejects_bad_magic() {
        assert!(ParamStore::read_binary(&b"NOTAPARM\x01\x00\x00\x00"[..]).is_err());
    }

    #[test]
    fn manifest_lists_shapes() {
        let m = sample_store().manifest();
        assert!(m.contains("l0.w shape=(2,3) count=6"));
        assert!(m.contains("little-endian"));
    }

    #[test]
    fn unknown_name_error_lists_registry() {
        let store = sample_store();
        let err = store.get("nope").unwrap_err();
        assert!(err.to_string().contains("l0.w"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn arbitrary_stores_round_trip(
                arrays in proptest::collection::vec(
                    (
                        "[a-z][a-z0-9.]{0,12}",
                        proptest::collection::vec(1usize..5, 1..3),
                    ),
                    1..6,
                ),
                fill in proptest::collection::vec(-1e12f64..1e12, 64),
            ) {
                let mut store = ParamStore::new();
                let mut k = 0usize;
                for (i, (name, shape)) in arrays.into_iter().enumerate() {
                    let len: usize = shape.iter().product();
                    let data: Vec<f64> = (0..len)
                        .map(|_| {
                            k += 1;
                            fill[k % fill.len()]
                        })
                        .collect();
                    // names must be unique within a store
                    store.insert(format!("{name}{i}"), Array { shape, data });
                }
                let mut buf = Vec::new();
                store.write_binary(&mut buf).unwrap();
                let back = ParamStore::read_binary(buf.as_slice()).unwrap();
                prop_assert_eq!(store, back);
            }
        }
    }
}
