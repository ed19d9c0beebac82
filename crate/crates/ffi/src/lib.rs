//! C ABI for `ordlevel`.
//!
//! Every object is an opaque heap handle released by its `_free` function.
//! Fallible calls return an [`OrdStatus`] and write results through out
//! pointers, which are left untouched on failure. Enumerations cross the
//! boundary as plain integers and are range-checked.

use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use ordlevel::boxsnake::{Side, Snake};
use ordlevel::domain::{rank_quantize, LevelUniverse};
use ordlevel::io::{to_json, BarcodeDocument};
use ordlevel::{Barcode, Direction, Domain, Error, OrderedSequence, Rule};

/// Result code of every fallible call.
pub type OrdStatus = u32;
pub const ORD_OK: OrdStatus = 0;
/// A required pointer argument was null.
pub const ORD_ERR_NULL: OrdStatus = 1;
/// Malformed input: empty or unordered values, ranks outside the universe,
/// unknown enumeration value.
pub const ORD_ERR_INPUT: OrdStatus = 2;
/// Index past the end of a barcode, or labels requested where none exist.
pub const ORD_ERR_RANGE: OrdStatus = 3;
/// A surgery precondition failed, e.g. a shift longer than the window.
pub const ORD_ERR_SURGERY: OrdStatus = 4;
/// Internal failure; the handle involved must not be used again except to
/// free it.
pub const ORD_ERR_INTERNAL: OrdStatus = 5;

pub type OrdDomain = u32;
pub const ORD_DOMAIN_LINEAR: OrdDomain = 0;
pub const ORD_DOMAIN_CIRCULAR: OrdDomain = 1;

pub type OrdRule = u32;
pub const ORD_RULE_ELDER: OrdRule = 0;
pub const ORD_RULE_LOCAL: OrdRule = 1;

pub type OrdDirection = u32;
pub const ORD_DIRECTION_SUB: OrdDirection = 0;
pub const ORD_DIRECTION_SUPER: OrdDirection = 1;

/// Side on which samples are dropped by a shift; new samples enter on the
/// other side.
pub type OrdSide = u32;
pub const ORD_SIDE_LEFT: OrdSide = 0;
pub const ORD_SIDE_RIGHT: OrdSide = 1;

/// One bar in rank space.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrdBar {
    pub birth: u32,
    pub death: u32,
    pub birth_index: usize,
    pub death_index: usize,
    pub essential: bool,
}

/// Ranked sequence on a linear or circular domain.
pub struct OrdSequence(OrderedSequence);

/// Barcode plus the universe it was computed over (for labels).
pub struct OrdBarcode {
    barcode: Barcode,
    universe: Arc<LevelUniverse>,
}

/// Sequence with an incrementally maintained box snake.
pub struct OrdSnake(Option<Snake>);

fn status_of(e: &Error) -> OrdStatus {
    match e {
        Error::EmptyInput
        | Error::UnorderedValue { .. }
        | Error::LevelOutOfRange { .. }
        | Error::EmptyUniverse
        | Error::InvalidLabels
        | Error::NonNumericLabels => ORD_ERR_INPUT,
        Error::IndexNotInMonotone { .. }
        | Error::EditViolatesMonotonicity { .. }
        | Error::CutOutOfRange { .. }
        | Error::EmptyPiece
        | Error::IncompatibleUniverses
        | Error::ShiftTooLong { .. }
        | Error::WrongDomain { .. } => ORD_ERR_SURGERY,
    }
}

/// Runs `f`, turning panics into `ORD_ERR_INTERNAL`.
fn guard(f: impl FnOnce() -> Result<(), OrdStatus>) -> OrdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ORD_OK,
        Ok(Err(s)) => s,
        Err(_) => ORD_ERR_INTERNAL,
    }
}

fn domain(d: OrdDomain) -> Result<Domain, OrdStatus> {
    match d {
        ORD_DOMAIN_LINEAR => Ok(Domain::Linear),
        ORD_DOMAIN_CIRCULAR => Ok(Domain::Circular),
        _ => Err(ORD_ERR_INPUT),
    }
}

fn rule(r: OrdRule) -> Result<Rule, OrdStatus> {
    match r {
        ORD_RULE_ELDER => Ok(Rule::ElderLeftmost),
        ORD_RULE_LOCAL => Ok(Rule::LocalNeighbor),
        _ => Err(ORD_ERR_INPUT),
    }
}

fn direction(d: OrdDirection) -> Result<Direction, OrdStatus> {
    match d {
        ORD_DIRECTION_SUB => Ok(Direction::Sub),
        ORD_DIRECTION_SUPER => Ok(Direction::Super),
        _ => Err(ORD_ERR_INPUT),
    }
}

/// Borrows `len` items; a zero length accepts any pointer, including null.
unsafe fn slice<'a, T>(data: *const T, len: usize) -> Result<&'a [T], OrdStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(ORD_ERR_NULL);
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, OrdStatus> {
    p.as_ref().ok_or(ORD_ERR_NULL)
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), OrdStatus> {
    if out.is_null() {
        return Err(ORD_ERR_NULL);
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn ord_status_message(status: OrdStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        ORD_OK => b"ok\0",
        ORD_ERR_NULL => b"null pointer argument\0",
        ORD_ERR_INPUT => b"invalid input\0",
        ORD_ERR_RANGE => b"index or label out of range\0",
        ORD_ERR_SURGERY => b"surgery precondition violated\0",
        ORD_ERR_INTERNAL => b"internal error\0",
        _ => b"unknown status\0",
    };
    msg.as_ptr().cast()
}

/// Library version, NUL-terminated.
#[no_mangle]
pub extern "C" fn ord_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Quantizes `len` raw values onto dense ranks; NaN is rejected.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ord_sequence_from_values(
    values: *const f64,
    len: usize,
    dom: OrdDomain,
    out: *mut *mut OrdSequence,
) -> OrdStatus {
    guard(|| {
        let v = slice(values, len)?;
        let seq = rank_quantize(v, domain(dom)?).map_err(|e| status_of(&e))?;
        emit(out, OrdSequence(seq))
    })
}

/// Sequence of ranks, each below `universe_size`.
///
/// # Safety
/// `ranks` must point to `len` readable integers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ord_sequence_from_ranks(
    ranks: *const u32,
    len: usize,
    universe_size: u32,
    dom: OrdDomain,
    out: *mut *mut OrdSequence,
) -> OrdStatus {
    guard(|| {
        let r = slice(ranks, len)?;
        let seq = OrderedSequence::from_ranks(r.to_vec(), universe_size, domain(dom)?)
            .map_err(|e| status_of(&e))?;
        emit(out, OrdSequence(seq))
    })
}

/// Number of samples; 0 for a null handle.
///
/// # Safety
/// `seq` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ord_sequence_len(seq: *const OrdSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.0.len())
}

/// Copies up to `cap` ranks into `out` and returns the sequence length.
///
/// # Safety
/// `seq` must be null or a live handle; `out` must have room for `cap` ranks.
#[no_mangle]
pub unsafe extern "C" fn ord_sequence_ranks(seq: *const OrdSequence, out: *mut u32, cap: usize) -> usize {
    let Some(s) = seq.as_ref() else { return 0 };
    let levels = s.0.levels();
    if !out.is_null() {
        ptr::copy_nonoverlapping(levels.as_ptr(), out, levels.len().min(cap));
    }
    levels.len()
}

/// # Safety
/// `seq` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ord_sequence_free(seq: *mut OrdSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// # Safety
/// `seq` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ord_barcode_compute(
    seq: *const OrdSequence,
    r: OrdRule,
    dir: OrdDirection,
    out: *mut *mut OrdBarcode,
) -> OrdStatus {
    guard(|| {
        let s = &deref(seq)?.0;
        let barcode = ordlevel::barcode::barcode(s, rule(r)?, direction(dir)?);
        emit(out, OrdBarcode { barcode, universe: s.universe().clone() })
    })
}

/// Number of bars; 0 for a null handle.
///
/// # Safety
/// `bc` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ord_barcode_len(bc: *const OrdBarcode) -> usize {
    bc.as_ref().map_or(0, |b| b.barcode.len())
}

/// Bars are ordered by birth index.
///
/// # Safety
/// `bc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ord_barcode_get(bc: *const OrdBarcode, index: usize, out: *mut OrdBar) -> OrdStatus {
    guard(|| {
        let b = deref(bc)?.barcode.bars.get(index).ok_or(ORD_ERR_RANGE)?;
        let out = out.as_mut().ok_or(ORD_ERR_NULL)?;
        *out = OrdBar {
            birth: b.birth_level,
            death: b.death_level,
            birth_index: b.birth_index,
            death_index: b.death_index,
            essential: b.essential,
        };
        Ok(())
    })
}

/// Original values at a bar's endpoints; `ORD_ERR_RANGE` for rank inputs.
///
/// # Safety
/// `bc` must be a live handle; `birth` and `death` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ord_barcode_labels(
    bc: *const OrdBarcode,
    index: usize,
    birth: *mut f64,
    death: *mut f64,
) -> OrdStatus {
    guard(|| {
        let h = deref(bc)?;
        if birth.is_null() || death.is_null() {
            return Err(ORD_ERR_NULL);
        }
        let b = h.barcode.bars.get(index).ok_or(ORD_ERR_RANGE)?;
        let lb = h.universe.label(b.birth_level).ok_or(ORD_ERR_RANGE)?;
        let ld = h.universe.label(b.death_level).ok_or(ORD_ERR_RANGE)?;
        *birth = lb;
        *death = ld;
        Ok(())
    })
}

/// Barcode as the JSON document printed by the command-line tool. Release the
/// string with [`ord_string_free`].
///
/// # Safety
/// `bc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ord_barcode_to_json(bc: *const OrdBarcode, out: *mut *mut c_char) -> OrdStatus {
    guard(|| {
        let h = deref(bc)?;
        if out.is_null() {
            return Err(ORD_ERR_NULL);
        }
        let text = to_json(&BarcodeDocument::new(&h.barcode, &h.universe, None));
        *out = CString::new(text).map_err(|_| ORD_ERR_INTERNAL)?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `bc` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ord_barcode_free(bc: *mut OrdBarcode) {
    if !bc.is_null() {
        drop(Box::from_raw(bc));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ord_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the box snake of a copy of `seq`.
///
/// # Safety
/// `seq` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ord_snake_new(seq: *const OrdSequence, out: *mut *mut OrdSnake) -> OrdStatus {
    guard(|| {
        let s = deref(seq)?.0.clone();
        emit(out, OrdSnake(Some(Snake::new(s))))
    })
}

fn live(h: &OrdSnake) -> Result<&Snake, OrdStatus> {
    h.0.as_ref().ok_or(ORD_ERR_INTERNAL)
}

/// Slides the window by `len` samples: drops `len` samples on `side` and
/// appends `ranks` on the other side, updating the box snake by cut and glue.
/// Ranks must lie in the sequence's universe.
///
/// # Safety
/// `snake` must be a live handle; `ranks` must point to `len` integers.
#[no_mangle]
pub unsafe extern "C" fn ord_snake_shift(
    snake: *mut OrdSnake,
    side: OrdSide,
    ranks: *const u32,
    len: usize,
) -> OrdStatus {
    guard(|| {
        let h = snake.as_mut().ok_or(ORD_ERR_NULL)?;
        let block = slice(ranks, len)?;
        let side = match side {
            ORD_SIDE_LEFT => Side::Left,
            ORD_SIDE_RIGHT => Side::Right,
            _ => return Err(ORD_ERR_INPUT),
        };
        let current = live(h)?;
        // checked up front: a failed shift would consume the snake
        if block.len() > current.len() {
            return Err(ORD_ERR_SURGERY);
        }
        let size = current.sequence().universe().size();
        if block.iter().any(|&r| r >= size) {
            return Err(ORD_ERR_INPUT);
        }
        let taken = h.0.take().ok_or(ORD_ERR_INTERNAL)?;
        let moved = taken.shift(side, block.to_vec()).map_err(|_| ORD_ERR_INTERNAL)?;
        h.0 = Some(moved);
        Ok(())
    })
}

/// Box and extremum-box counts; either out pointer may be null.
///
/// # Safety
/// `snake` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ord_snake_box_counts(
    snake: *const OrdSnake,
    boxes: *mut usize,
    extrema: *mut usize,
) -> OrdStatus {
    guard(|| {
        let bs = live(deref(snake)?)?.box_snake();
        if let Some(b) = boxes.as_mut() {
            *b = bs.boxes.len();
        }
        if let Some(e) = extrema.as_mut() {
            *e = bs.extrema().count();
        }
        Ok(())
    })
}

/// Barcode computed from the extremum boxes.
///
/// # Safety
/// `snake` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ord_snake_barcode(
    snake: *const OrdSnake,
    r: OrdRule,
    dir: OrdDirection,
    out: *mut *mut OrdBarcode,
) -> OrdStatus {
    guard(|| {
        let s = live(deref(snake)?)?;
        let barcode = s.barcode(rule(r)?, direction(dir)?);
        emit(out, OrdBarcode { barcode, universe: s.sequence().universe().clone() })
    })
}

/// Copy of the current window.
///
/// # Safety
/// `snake` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ord_snake_sequence(snake: *const OrdSnake, out: *mut *mut OrdSequence) -> OrdStatus {
    guard(|| {
        let s = live(deref(snake)?)?;
        emit(out, OrdSequence(s.sequence().clone()))
    })
}

/// # Safety
/// `snake` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ord_snake_free(snake: *mut OrdSnake) {
    if !snake.is_null() {
        drop(Box::from_raw(snake));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_messages_are_distinct() {
        let msgs: Vec<_> = (0..=6)
            .map(|s| unsafe { std::ffi::CStr::from_ptr(ord_status_message(s)) }.to_owned())
            .collect();
        for (i, a) in msgs.iter().enumerate() {
            assert!(msgs[i + 1..].iter().all(|b| b != a));
        }
    }

    #[test]
    fn every_error_maps_to_a_code() {
        assert_eq!(status_of(&Error::EmptyInput), ORD_ERR_INPUT);
        assert_eq!(status_of(&Error::ShiftTooLong { shift: 2, len: 1 }), ORD_ERR_SURGERY);
    }
}
