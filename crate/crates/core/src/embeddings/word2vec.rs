use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{EmbeddingError, EmbeddingSet};

/// Reads the word2vec binary layout: an ASCII `"<count> <dim>\n"` header,
/// then `count` records of `word 0x20 f32le×dim [0x0A]`.
pub fn load_word2vec_binary(path: &Path) -> Result<EmbeddingSet, EmbeddingError> {
    parse_word2vec_binary(&fs::read(path)?)
}

pub fn parse_word2vec_binary(bytes: &[u8]) -> Result<EmbeddingSet, EmbeddingError> {
    let header_end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| EmbeddingError::Header("missing newline".into()))?;
    let header = std::str::from_utf8(&bytes[..header_end])
        .map_err(|_| EmbeddingError::Header("not ASCII".into()))?;
    let (count, dim) = parse_header(header)?;
    if dim == 0 {
        return Err(EmbeddingError::ZeroDim);
    }
    let mut set = EmbeddingSet::new(dim)?;
    let mut pos = header_end + 1;
    let mut vector = vec![0f32; dim];
    for word_index in 0..count {
        let record_start = pos;
        let rest = &bytes[pos..];
        let word_len = rest
            .iter()
            .position(|&b| b == b' ')
            .ok_or(EmbeddingError::Truncated { word_index, offset: bytes.len() })?;
        if word_len == 0 {
            return Err(EmbeddingError::EmptyWord { word_index, offset: record_start });
        }
        let word = std::str::from_utf8(&rest[..word_len])
            .map_err(|_| EmbeddingError::InvalidUtf8 { word_index, offset: record_start })?;
        pos += word_len + 1;
        let payload = dim * 4;
        if bytes.len() - pos < payload {
            return Err(EmbeddingError::Truncated { word_index, offset: bytes.len() });
        }
        for (v, chunk) in vector.iter_mut().zip(bytes[pos..pos + payload].chunks_exact(4)) {
            *v = f32::from_le_bytes(chunk.try_into().unwrap());
        }
        pos += payload;
        if bytes.get(pos) == Some(&b'\n') {
            pos += 1;
        }
        set.insert(word, &vector).map_err(|e| match e {
            EmbeddingError::Duplicate { word, .. } => {
                EmbeddingError::Duplicate { word, word_index, offset: record_start }
            }
            other => other,
        })?;
    }
    if pos != bytes.len() {
        return Err(EmbeddingError::TrailingData { offset: pos, extra: bytes.len() - pos });
    }
    Ok(set)
}

fn parse_header(header: &str) -> Result<(usize, usize), EmbeddingError> {
    let bad = || EmbeddingError::Header(format!("expected \"<count> <dim>\", got {header:?}"));
    let (count, dim) = header.split_once(' ').ok_or_else(bad)?;
    let number = |s: &str| -> Result<usize, EmbeddingError> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse().map_err(|_| bad())
    };
    Ok((number(count)?, number(dim)?))
}

/// Emits the layout read by [`parse_word2vec_binary`], newline after each record.
pub fn write_word2vec_binary<W: Write>(set: &EmbeddingSet, mut out: W) -> Result<(), EmbeddingError> {
    if set.is_empty() {
        return Err(EmbeddingError::EmptySet);
    }
    write!(out, "{} {}\n", set.len(), set.dim())?;
    for (word, vector) in set.iter() {
        if word.is_empty() || word.bytes().any(|b| b.is_ascii_whitespace()) {
            return Err(EmbeddingError::InvalidWord(word.to_string()));
        }
        out.write_all(word.as_bytes())?;
        out.write_all(b" ")?;
        for v in vector {
            out.write_all(&v.to_le_bytes())?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_word2vec_binary(set: &EmbeddingSet, path: &Path) -> Result<(), EmbeddingError> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_word2vec_binary(set, &mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(word: &str, v: &[f32]) -> Vec<u8> {
        let mut b = word.as_bytes().to_vec();
        b.push(b' ');
        for x in v {
            b.extend_from_slice(&x.to_le_bytes());
        }
        b
    }

    #[test]
    fn parses_two_records() {
        let mut bytes = b"2 3\n".to_vec();
        bytes.extend(record("yes", &[1.0, 2.0, 3.0]));
        bytes.push(b'\n');
        bytes.extend(record("no", &[-1.0, 0.5, 0.25]));
        let set = parse_word2vec_binary(&bytes).unwrap();
        assert_eq!(set.dim(), 3);
        assert_eq!(set.len(), 2);
        assert_eq!(set.get("no").unwrap(), &[-1.0, 0.5, 0.25]);
    }

    #[test]
    fn single_word_file() {
        let mut set = EmbeddingSet::new(2).unwrap();
        set.insert("yes", &[0.5, -0.5]).unwrap();
        let mut buf = Vec::new();
        write_word2vec_binary(&set, &mut buf).unwrap();
        let mut expect = b"1 2\n".to_vec();
        expect.extend(record("yes", &[0.5, -0.5]));
        expect.push(b'\n');
        assert_eq!(buf, expect);
    }

    #[test]
    fn preserves_special_float_bits() {
        let mut set = EmbeddingSet::new(3).unwrap();
        set.insert("w", &[f32::from_bits(0x7fc0_0001), -0.0, f32::MIN_POSITIVE / 2.0]).unwrap();
        let mut buf = Vec::new();
        write_word2vec_binary(&set, &mut buf).unwrap();
        let back = parse_word2vec_binary(&buf).unwrap();
        let bits: Vec<u32> = back.get("w").unwrap().iter().map(|v| v.to_bits()).collect();
        assert_eq!(bits, [0x7fc0_0001, 0x8000_0000, (f32::MIN_POSITIVE / 2.0).to_bits()]);
    }

    #[test]
    fn truncated_final_record_names_index() {
        let mut bytes = b"2 2\n".to_vec();
        bytes.extend(record("a", &[1.0, 2.0]));
        bytes.push(b'\n');
        bytes.extend(&record("b", &[1.0, 2.0])[..5]);
        let err = parse_word2vec_binary(&bytes).unwrap_err();
        assert!(matches!(err, EmbeddingError::Truncated { word_index: 1, .. }), "{err}");
        assert!(err.to_string().contains("record 1"));
    }

    #[test]
    fn rejects_bad_sets_on_save() {
        let empty = EmbeddingSet::new(2).unwrap();
        assert!(matches!(write_word2vec_binary(&empty, Vec::new()), Err(EmbeddingError::EmptySet)));
        assert!(matches!(EmbeddingSet::new(0), Err(EmbeddingError::ZeroDim)));
        let mut spaced = EmbeddingSet::new(1).unwrap();
        spaced.insert("a b", &[1.0]).unwrap();
        assert!(matches!(write_word2vec_binary(&spaced, Vec::new()), Err(EmbeddingError::InvalidWord(_))));
    }
}
