//! Packing of m-bit symbols into bytes, most significant bit first.

use hecc_core::Elem;

/// Packs symbols into `ceil(len * m / 8)` bytes, zero-padding the last byte.
pub fn pack(symbols: &[Elem], m: u32) -> Vec<u8> {
    if m == 8 {
        return symbols.iter().map(|s| s.value() as u8).collect();
    }
    let mut out = Vec::with_capacity((symbols.len() * m as usize).div_ceil(8));
    let mut acc: u32 = 0;
    let mut bits = 0u32;
    for s in symbols {
        acc = (acc << m) | s.value() as u32;
        bits += m;
        while bits >= 8 {
            bits -= 8;
            out.push((acc >> bits) as u8);
        }
        acc &= (1 << bits) - 1;
    }
    if bits > 0 {
        out.push((acc << (8 - bits)) as u8);
    }
    out
}

/// Reads `count` symbols from the front of `bytes`, or `None` if too short.
pub fn unpack(bytes: &[u8], m: u32, count: usize) -> Option<Vec<Elem>> {
    if bytes.len() * 8 < count * m as usize {
        return None;
    }
    if m == 8 {
        return Some(
            bytes[..count]
                .iter()
                .map(|&b| Elem::from_raw(b as u16))
                .collect(),
        );
    }
    let mut out = Vec::with_capacity(count);
    let mut acc: u32 = 0;
    let mut bits = 0u32;
    let mut it = bytes.iter();
    while out.len() < count {
        while bits < m {
            acc = (acc << 8) | *it.next()? as u32;
            bits += 8;
        }
        bits -= m;
        out.push(Elem::from_raw((acc >> bits) as u16));
        acc &= (1 << bits) - 1;
    }
    Some(out)
}

/// Number of bytes holding `count` packed symbols.
pub fn packed_len(count: usize, m: u32) -> usize {
    (count * m as usize).div_ceil(8)
}

/// Splits data into m-bit symbols, zero-padding to a whole symbol.
pub fn bytes_to_symbols(data: &[u8], m: u32) -> Vec<Elem> {
    let count = (data.len() * 8).div_ceil(m as usize);
    let mut padded = data.to_vec();
    padded.resize(packed_len(count, m), 0);
    unpack(&padded, m, count).expect("padded to fit")
}

/// Inverse of [`bytes_to_symbols`], truncated to `len` bytes.
pub fn symbols_to_bytes(symbols: &[Elem], m: u32, len: usize) -> Vec<u8> {
    let mut out = pack(symbols, m);
    out.truncate(len);
    out
}
