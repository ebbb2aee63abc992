//! C interface to the talk-table parser, labeling, sentence splitting, the
//! baseline model and the metrics suite.
//!
//! Conventions:
//! - Every fallible function returns a [`PcStatus`]; on failure
//!   [`pc_last_error_message`] describes the error for the calling thread.
//! - Handles are opaque and released with their `_free` function.
//! - Strings going in are NUL-terminated UTF-8. Strings coming out are owned
//!   by the caller and released with [`pc_string_free`]; byte buffers with
//!   [`pc_bytes_free`].
//! - Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use persuasion_corpus::baseline::{predict, BaselineModel};
use persuasion_corpus::metrics::{metrics, ConfusionMatrix};
use persuasion_corpus::pipeline::{detect_label, sentence_tokenize, strip_tags_and_markup, Label, Patterns, PipelineConfig};
use persuasion_corpus::tlk::{parse_tlk, parse_tlk_xml, render_tlk_xml, write_tlk, CodepageConfig, TalkTable, TlkError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    BadMagic = 3,
    BadVersion = 4,
    Truncated = 5,
    Decode = 6,
    Encode = 7,
    Malformed = 8,
    UnknownEncoding = 9,
    OutOfRange = 10,
    Model = 11,
    InvalidArgument = 12,
    Panic = 13,
}

/// Parsed talk table.
pub struct PcTalkTable {
    table: TalkTable,
    codepages: CodepageConfig,
}

/// Loaded baseline model.
pub struct PcModel(BaselineModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

type FfiResult<T> = Result<T, (PcStatus, String)>;

fn fail<T>(status: PcStatus, msg: impl Into<String>) -> FfiResult<T> {
    Err((status, msg.into()))
}

fn tlk_status(e: &TlkError) -> PcStatus {
    match e {
        TlkError::BadMagic { .. } => PcStatus::BadMagic,
        TlkError::BadVersion { .. } => PcStatus::BadVersion,
        TlkError::Truncated { .. } => PcStatus::Truncated,
        TlkError::DecodeError { .. } => PcStatus::Decode,
        TlkError::EncodeError { .. } | TlkError::ResrefTooLong { .. } | TlkError::TooManyEntries(_) => PcStatus::Encode,
        TlkError::UnknownEncoding(_) => PcStatus::UnknownEncoding,
        TlkError::MalformedDocument(_) | TlkError::DuplicateId(_) => PcStatus::Malformed,
    }
}

fn from_tlk(e: TlkError) -> (PcStatus, String) {
    (tlk_status(&e), e.to_string())
}

/// Runs `f`, turning errors and panics into a status plus thread-local message.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> PcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PcStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PcStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return fail(PcStatus::NullPointer, format!("{name} is NULL"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(PcStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn bytes_arg<'a>(p: *const u8, len: usize, name: &str) -> FfiResult<&'a [u8]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(PcStatus::NullPointer, format!("{name} is NULL"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn check_out<T>(p: *mut T, name: &str) -> FfiResult<()> {
    if p.is_null() {
        fail(PcStatus::NullPointer, format!("{name} is NULL"))
    } else {
        Ok(())
    }
}

unsafe fn table_ref<'a>(p: *const PcTalkTable) -> FfiResult<&'a PcTalkTable> {
    p.as_ref().ok_or((PcStatus::NullPointer, "table is NULL".to_string()))
}

fn c_string(s: String) -> FfiResult<*mut c_char> {
    CString::new(s)
        .map(CString::into_raw)
        .or_else(|_| fail(PcStatus::InvalidArgument, "result contains a NUL character"))
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into this library from the same thread; do not free.
#[no_mangle]
pub extern "C" fn pc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases a byte buffer returned by this library. NULL is ignored.
///
/// # Safety
/// `data`/`len` must be exactly as returned and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pc_bytes_free(data: *mut u8, len: usize) {
    if !data.is_null() {
        drop(Vec::from_raw_parts(data, len, len));
    }
}

/// Parses a binary talk table. `encoding` (a WHATWG label such as
/// "windows-1252") applies to every entry; NULL selects the per-language
/// defaults.
///
/// # Safety
/// `data` must point to `len` readable bytes; `encoding` must be NULL or a
/// NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_tlk_parse(
    data: *const u8,
    len: usize,
    encoding: *const c_char,
    out: *mut *mut PcTalkTable,
) -> PcStatus {
    guard(|| {
        check_out(out, "out")?;
        let bytes = bytes_arg(data, len, "data")?;
        let codepages = if encoding.is_null() {
            CodepageConfig::default()
        } else {
            CodepageConfig::uniform(str_arg(encoding, "encoding")?).map_err(from_tlk)?
        };
        let table = parse_tlk(bytes, &codepages).map_err(from_tlk)?;
        *out = Box::into_raw(Box::new(PcTalkTable { table, codepages }));
        Ok(())
    })
}

/// Parses an XML talk table. Missing ids are filled with empty entries.
///
/// # Safety
/// `xml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_tlk_parse_xml(xml: *const c_char, out: *mut *mut PcTalkTable) -> PcStatus {
    guard(|| {
        check_out(out, "out")?;
        let (table, _) = parse_tlk_xml(str_arg(xml, "xml")?).map_err(from_tlk)?;
        *out = Box::into_raw(Box::new(PcTalkTable {
            table,
            codepages: CodepageConfig::default(),
        }));
        Ok(())
    })
}

/// # Safety
/// `table` must be NULL or a live handle from `pc_tlk_parse*`.
#[no_mangle]
pub unsafe extern "C" fn pc_tlk_free(table: *mut PcTalkTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of entries; 0 for NULL.
///
/// # Safety
/// `table` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_tlk_len(table: *const PcTalkTable) -> usize {
    table.as_ref().map_or(0, |t| t.table.len())
}

/// Language id from the header; 0 for NULL.
///
/// # Safety
/// `table` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_tlk_language_id(table: *const PcTalkTable) -> u32 {
    table.as_ref().map_or(0, |t| t.table.language_id)
}

/// Text of entry `str_ref` (empty when the entry has no text).
///
/// # Safety
/// `table` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_tlk_text(table: *const PcTalkTable, str_ref: u32, out: *mut *mut c_char) -> PcStatus {
    guard(|| {
        check_out(out, "out")?;
        let t = table_ref(table)?;
        let entry = t.table.get(str_ref).ok_or_else(|| {
            (
                PcStatus::OutOfRange,
                format!("StrRef {str_ref} is out of range (table has {} entries)", t.table.len()),
            )
        })?;
        *out = c_string(entry.text.clone())?;
        Ok(())
    })
}

/// Serializes to canonical binary form with the encodings used to parse it.
///
/// # Safety
/// `table` must be a live handle; `out_data` and `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_tlk_write(table: *const PcTalkTable, out_data: *mut *mut u8, out_len: *mut usize) -> PcStatus {
    guard(|| {
        check_out(out_data, "out_data")?;
        check_out(out_len, "out_len")?;
        let t = table_ref(table)?;
        let bytes = write_tlk(&t.table, &t.codepages).map_err(from_tlk)?.into_boxed_slice();
        *out_len = bytes.len();
        *out_data = Box::into_raw(bytes).cast();
        Ok(())
    })
}

/// Renders the table as XML.
///
/// # Safety
/// `table` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_tlk_to_xml(table: *const PcTalkTable, out: *mut *mut c_char) -> PcStatus {
    guard(|| {
        check_out(out, "out")?;
        *out = c_string(render_tlk_xml(&table_ref(table)?.table))?;
        Ok(())
    })
}

/// Sets `*is_persuade` to 1 when `text` carries a persuasion tag under the
/// default patterns, else 0.
///
/// # Safety
/// `text` must be a NUL-terminated string; `is_persuade` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_detect_label(text: *const c_char, is_persuade: *mut c_int) -> PcStatus {
    guard(|| {
        check_out(is_persuade, "is_persuade")?;
        let text = str_arg(text, "text")?;
        let patterns = Patterns::from_config(&PipelineConfig::default())
            .or_else(|e| fail(PcStatus::InvalidArgument, e.to_string()))?;
        let (label, _) = detect_label(text, &patterns.tags);
        *is_persuade = c_int::from(label == Label::Persuade);
        Ok(())
    })
}

/// Removes bracketed tags and markup and collapses whitespace.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_clean_text(text: *const c_char, out: *mut *mut c_char) -> PcStatus {
    guard(|| {
        check_out(out, "out")?;
        *out = c_string(strip_tags_and_markup(str_arg(text, "text")?))?;
        Ok(())
    })
}

/// Splits `text` into sentences; the result is a JSON array of strings.
///
/// # Safety
/// `text` and `language` must be NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn pc_sentence_tokenize(
    text: *const c_char,
    language: *const c_char,
    out_json: *mut *mut c_char,
) -> PcStatus {
    guard(|| {
        check_out(out_json, "out_json")?;
        let sentences = sentence_tokenize(str_arg(text, "text")?, str_arg(language, "language")?);
        let json = serde_json::to_string(&sentences).expect("strings serialize");
        *out_json = c_string(json)?;
        Ok(())
    })
}

/// Loads a baseline model from the bytes of a model file.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_model_load(data: *const u8, len: usize, out: *mut *mut PcModel) -> PcStatus {
    guard(|| {
        check_out(out, "out")?;
        let model = BaselineModel::from_bytes(bytes_arg(data, len, "data")?)
            .or_else(|e| fail(PcStatus::Model, e.to_string()))?;
        *out = Box::into_raw(Box::new(PcModel(model)));
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a live handle from `pc_model_load`.
#[no_mangle]
pub unsafe extern "C" fn pc_model_free(model: *mut PcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Persuade probability of `text` and the resulting label (1 = persuade).
/// Safe to call from several threads on one model.
///
/// # Safety
/// `model` must be a live handle; `text` a NUL-terminated string; both
/// output pointers writable.
#[no_mangle]
pub unsafe extern "C" fn pc_model_predict(
    model: *const PcModel,
    text: *const c_char,
    probability: *mut f64,
    is_persuade: *mut c_int,
) -> PcStatus {
    guard(|| {
        check_out(probability, "probability")?;
        check_out(is_persuade, "is_persuade")?;
        let model = model.as_ref().ok_or((PcStatus::NullPointer, "model is NULL".to_string()))?;
        let p = predict(&model.0, str_arg(text, "text")?);
        *probability = p.probability;
        *is_persuade = c_int::from(p.label == Label::Persuade);
        Ok(())
    })
}

/// Metrics report (JSON) for a confusion matrix with persuade as positive.
///
/// # Safety
/// `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_metrics_json(tp: u64, fp: u64, fn_count: u64, tn: u64, out_json: *mut *mut c_char) -> PcStatus {
    guard(|| {
        check_out(out_json, "out_json")?;
        let report = metrics(&ConfusionMatrix { tp, fp, fn_: fn_count, tn }).or_else(|e| fail(PcStatus::InvalidArgument, e.to_string()))?;
        *out_json = c_string(report.to_json())?;
        Ok(())
    })
}
