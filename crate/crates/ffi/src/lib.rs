//! C interface to `invdecomp`.
//!
//! Systems and functions live behind opaque handles. Every call returns an
//! [`InvdStatus`]; results come back as JSON documents in the same shape the
//! command-line tool prints, allocated by the library and released with
//! [`invd_string_free`].

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use invdecomp::cli::{self, Instance, Method, Outcome, Report};
use invdecomp::error::Error;
use invdecomp::rational::ratio;
use invdecomp::star::PremiseConvention;
use invdecomp::{CommutingSystem, RationalFunction};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvdStatus {
    Ok = 0,
    /// A certificate was produced: star violation, dual certificate or
    /// obstruction.
    Violation = 1,
    InputError = 2,
    NotCommuting = 3,
    NullPointer = 4,
    /// A panic or broken internal contract; please report it.
    Internal = 5,
}

/// Opaque commuting system.
pub struct InvdSystem {
    system: CommutingSystem,
}

/// Opaque table of exact rational values.
pub struct InvdFunction {
    values: RationalFunction,
}

fn guard(body: impl FnOnce() -> InvdStatus) -> InvdStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(InvdStatus::Internal)
}

fn status_of(outcome: &Outcome) -> InvdStatus {
    match outcome {
        Outcome::InputError { witness: Some(_), .. } => InvdStatus::NotCommuting,
        Outcome::InputError { message, .. } if message.contains("internal contract") => InvdStatus::Internal,
        Outcome::InputError { .. } => InvdStatus::InputError,
        other if other.exit_code() == cli::EXIT_OK => InvdStatus::Ok,
        _ => InvdStatus::Violation,
    }
}

/// Writes the report to `out` and returns its status.
///
/// # Safety
/// `out` must be valid for a pointer write.
unsafe fn emit(report: &Report, out: *mut *mut c_char) -> InvdStatus {
    let Ok(text) = CString::new(report.to_json()) else {
        return InvdStatus::Internal;
    };
    *out = text.into_raw();
    status_of(&report.outcome)
}

/// Builds a system from `n_transforms` image tables of length `size`, laid
/// out one after another (`images[j * size + x]` is `T_j(x)`, 0-based).
///
/// # Safety
/// `images` must point to `n_transforms * size` readable values and `out`
/// must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn invd_system_new(
    images: *const usize,
    n_transforms: usize,
    size: usize,
    out: *mut *mut InvdSystem,
) -> InvdStatus {
    if images.is_null() || out.is_null() {
        return InvdStatus::NullPointer;
    }
    guard(|| {
        let Some(total) = n_transforms.checked_mul(size) else {
            return InvdStatus::InputError;
        };
        if n_transforms == 0 {
            return InvdStatus::InputError;
        }
        let flat = std::slice::from_raw_parts(images, total);
        let tables = flat.chunks(size.max(1)).map(<[usize]>::to_vec).collect();
        match CommutingSystem::from_images(tables) {
            Ok(system) => {
                *out = Box::into_raw(Box::new(InvdSystem { system }));
                InvdStatus::Ok
            }
            Err(Error::NotCommuting { .. }) => InvdStatus::NotCommuting,
            Err(_) => InvdStatus::InputError,
        }
    })
}

/// # Safety
/// `system` must come from [`invd_system_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn invd_system_free(system: *mut InvdSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Domain size of a system, or 0 for a null handle.
///
/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn invd_system_size(system: *const InvdSystem) -> usize {
    system.as_ref().map_or(0, |s| s.system.size())
}

/// Builds the function `x ↦ numer[x] / denom[x]`. A null `denom` means all
/// denominators are 1; a zero denominator is an input error.
///
/// # Safety
/// `numer` (and `denom` unless null) must point to `len` readable values and
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn invd_function_new(
    numer: *const i64,
    denom: *const i64,
    len: usize,
    out: *mut *mut InvdFunction,
) -> InvdStatus {
    if numer.is_null() || out.is_null() {
        return InvdStatus::NullPointer;
    }
    guard(|| {
        let p = std::slice::from_raw_parts(numer, len);
        let q: Vec<i64> = if denom.is_null() {
            vec![1; len]
        } else {
            std::slice::from_raw_parts(denom, len).to_vec()
        };
        if q.contains(&0) {
            return InvdStatus::InputError;
        }
        let values = RationalFunction::new(p.iter().zip(&q).map(|(&a, &b)| ratio(a, b)).collect());
        *out = Box::into_raw(Box::new(InvdFunction { values }));
        InvdStatus::Ok
    })
}

/// # Safety
/// `f` must come from [`invd_function_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn invd_function_free(f: *mut InvdFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// Handles must be live and `out` valid for a pointer write.
unsafe fn with_instance(
    name: &str,
    system: *const InvdSystem,
    f: *const InvdFunction,
    out: *mut *mut c_char,
    run: impl FnOnce(&Instance) -> Outcome,
) -> InvdStatus {
    if system.is_null() || f.is_null() || out.is_null() {
        return InvdStatus::NullPointer;
    }
    guard(|| {
        let (system, f) = (&(*system).system, &(*f).values);
        let outcome = match system.domain().check_function(f) {
            Err(e) => Outcome::InputError {
                message: format!("f: {e}"),
                witness: None,
            },
            Ok(()) => run(&Instance::Finite {
                system: system.clone(),
                f: f.clone(),
                labels: None,
            }),
        };
        emit(
            &Report {
                command: name.to_string(),
                outcome,
            },
            out,
        )
    })
}

fn bound_arg(bound: usize) -> Option<usize> {
    (bound > 0).then_some(bound)
}

/// Decomposes `f` over `system`; `bound = 0` selects the default `2N`.
///
/// # Safety
/// Handles must be live and `json_out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn invd_decompose(
    system: *const InvdSystem,
    f: *const InvdFunction,
    bound: usize,
    json_out: *mut *mut c_char,
) -> InvdStatus {
    with_instance("decompose", system, f, json_out, |inst| {
        cli::decompose_instance(inst, Method::Auto, bound_arg(bound))
    })
}

/// Checks Condition (*); `bound = 0` selects the default `2N`.
///
/// # Safety
/// Handles must be live and `json_out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn invd_check_star(
    system: *const InvdSystem,
    f: *const InvdFunction,
    bound: usize,
    json_out: *mut *mut c_char,
) -> InvdStatus {
    with_instance("star-check", system, f, json_out, |inst| {
        cli::star_check_instance(inst, bound_arg(bound), PremiseConvention::Natural)
    })
}

/// # Safety
/// Handles must be live and `json_out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn invd_oracle(
    system: *const InvdSystem,
    f: *const InvdFunction,
    json_out: *mut *mut c_char,
) -> InvdStatus {
    with_instance("oracle", system, f, json_out, cli::oracle_instance)
}

/// Runs a subcommand (`validate`, `decompose`, `star-check`, `oracle`,
/// `lattice-decompose`, `bounded-transfer`) on an instance document.
///
/// # Safety
/// `command` and `instance_json` must be NUL-terminated strings and
/// `json_out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn invd_run_json(
    command: *const c_char,
    instance_json: *const c_char,
    bound: usize,
    json_out: *mut *mut c_char,
) -> InvdStatus {
    if command.is_null() || instance_json.is_null() || json_out.is_null() {
        return InvdStatus::NullPointer;
    }
    guard(|| {
        let (Ok(name), Ok(text)) = (CStr::from_ptr(command).to_str(), CStr::from_ptr(instance_json).to_str()) else {
            return InvdStatus::InputError;
        };
        emit(&cli::run_on_text(name, text, bound_arg(bound)), json_out)
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn invd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn invd_status_name(status: InvdStatus) -> *const c_char {
    let name: &'static CStr = match status {
        InvdStatus::Ok => c"ok",
        InvdStatus::Violation => c"violation",
        InvdStatus::InputError => c"input-error",
        InvdStatus::NotCommuting => c"not-commuting",
        InvdStatus::NullPointer => c"null-pointer",
        InvdStatus::Internal => c"internal",
    };
    name.as_ptr()
}
