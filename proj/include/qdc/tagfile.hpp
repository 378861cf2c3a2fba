#pragma once

#include <filesystem>

#include "qdc/experiment.hpp"

namespace qdc {

enum class TagFormat { binary, csv };

/// Writes the stream to disk (temp file + atomic rename; no partial files
/// on failure). Binary layout: magic "CSTG", format version u16 LE, header
/// length u32 LE, header text (key = value snapshot of the run plus
/// record_count), then 16-byte little-endian records: channel u16,
/// pulse_index u48, timestamp_ps u64. The CSV variant carries the same
/// header as "# " comment lines followed by channel,pulse_index,timestamp_ps
/// rows.
void write_tagfile(const TimeTagStream& stream, const std::filesystem::path& path,
                   TagFormat format);

/// Reads either encoding (dispatching on the magic bytes). Throws
/// FormatError with a byte offset on bad magic, truncation, header/body
/// count mismatch or unsorted records.
TimeTagStream read_tagfile(const std::filesystem::path& path);

}  // namespace qdc
