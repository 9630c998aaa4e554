//! Arithmetic over GF(2^8) with the AES reduction polynomial 0x11B.
//!
//! Multiplication is table-driven (log/antilog, generator 3) so results are
//! bit-identical across platforms. Tables are built at compile time.

const POLY: u16 = 0x11B;

const fn build_tables() -> ([u8; 256], [u8; 510]) {
    let mut log = [0u8; 256];
    let mut exp = [0u8; 510];
    let mut x: u8 = 1;
    let mut i = 0;
    while i < 255 {
        exp[i] = x;
        log[x as usize] = i as u8;
        // advance by the generator 3: x*3 = xtime(x) ^ x
        let doubled = ((x as u16) << 1) ^ if x & 0x80 != 0 { POLY } else { 0 };
        x = (doubled as u8) ^ x;
        i += 1;
    }
    // duplicate so mul can index log[a] + log[b] without a modulo
    while i < 510 {
        exp[i] = exp[i - 255];
        i += 1;
    }
    (log, exp)
}

const TABLES: ([u8; 256], [u8; 510]) = build_tables();
const LOG: [u8; 256] = TABLES.0;
const EXP: [u8; 510] = TABLES.1;

#[inline]
pub fn mul(a: u8, b: u8) -> u8 {
    if a == 0 || b == 0 {
        0
    } else {
        EXP[LOG[a as usize] as usize + LOG[b as usize] as usize]
    }
}

/// Multiplicative inverse. Panics on zero.
#[inline]
pub fn inv(a: u8) -> u8 {
    assert_ne!(a, 0, "inverse of zero in GF(256)");
    EXP[255 - LOG[a as usize] as usize]
}

#[inline]
pub fn div(a: u8, b: u8) -> u8 {
    mul(a, inv(b))
}

/// dst ^= c * src, elementwise. The workhorse of encoding and elimination.
pub fn mul_add_assign(dst: &mut [u8], src: &[u8], c: u8) {
    debug_assert_eq!(dst.len(), src.len());
    if c == 0 {
        return;
    }
    if c == 1 {
        for (d, s) in dst.iter_mut().zip(src) {
            *d ^= s;
        }
        return;
    }
    let lc = LOG[c as usize] as usize;
    for (d, s) in dst.iter_mut().zip(src) {
        if *s != 0 {
            *d ^= EXP[lc + LOG[*s as usize] as usize];
        }
    }
}

/// dst *= c, elementwise.
pub fn scale_assign(dst: &mut [u8], c: u8) {
    if c == 1 {
        return;
    }
    for d in dst.iter_mut() {
        *d = mul(*d, c);
    }
}
