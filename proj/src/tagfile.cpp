#include "qdc/tagfile.hpp"

#include <charconv>
#include <cstring>
#include <sstream>

#include "qdc/config.hpp"
#include "qdc/io_util.hpp"

namespace qdc {

namespace {

constexpr char kMagic[4] = {'C', 'S', 'T', 'G'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kRecordBytes = 16;
constexpr std::uint64_t kMaxPulseIndex = (std::uint64_t(1) << 48) - 1;
constexpr const char* kCsvBanner = "# qdcascade tag stream";
constexpr const char* kCsvColumns = "channel,pulse_index,timestamp_ps";

void check_writable(const TimeTagStream& stream) {
  std::int64_t prev = 0;
  for (const auto& r : stream.records) {
    if (r.timestamp_ps < prev) throw ValidationError("write_tagfile: records are not time-sorted");
    if (r.pulse_index > kMaxPulseIndex)
      throw ValidationError("write_tagfile: pulse_index exceeds 48 bits");
    if (r.timestamp_ps < 0) throw ValidationError("write_tagfile: negative timestamp");
    prev = r.timestamp_ps;
  }
}

/// Header text of a stream: run snapshot plus the record count.
std::string header_text(const TimeTagStream& stream) {
  std::ostringstream os;
  os << serialize_stream_header(stream.header.params, stream.header.config);
  os << "record_count = " << stream.records.size() << '\n';
  return os.str();
}

/// Splits the record_count line out of a header and parses the rest.
StreamHeader parse_header_text(const std::string& text, std::uint64_t base_offset) {
  std::string config_text;
  config_text.reserve(text.size());
  std::uint64_t count = 0;
  bool have_count = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    const std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.rfind("record_count", 0) == 0) {
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw FormatError(base_offset, "malformed record_count header line");
      const std::string value = line.substr(eq + 1);
      const char* begin = value.data();
      while (*begin == ' ') ++begin;
      const auto res = std::from_chars(begin, value.data() + value.size(), count);
      if (res.ec != std::errc{})
        throw FormatError(base_offset, "malformed record_count header line");
      have_count = true;
    } else {
      config_text += line;
      config_text += '\n';
    }
  }
  if (!have_count) throw FormatError(base_offset, "header is missing record_count");

  StreamHeader header;
  try {
    const RunConfig run = parse_config(config_text);
    header.params = run.source;
    header.config = run.experiment;
  } catch (const ParseError& e) {
    throw FormatError(base_offset, std::string("invalid header: ") + e.what());
  }
  header.record_count = count;
  return header;
}

void append_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void append_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void append_u48(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 6; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void append_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t load_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void write_binary(const TimeTagStream& stream, const std::filesystem::path& path) {
  const std::string header = header_text(stream);
  std::string payload;
  payload.reserve(10 + header.size() + stream.records.size() * kRecordBytes);
  payload.append(kMagic, 4);
  append_u16(payload, kVersion);
  append_u32(payload, static_cast<std::uint32_t>(header.size()));
  payload += header;
  for (const auto& r : stream.records) {
    append_u16(payload, r.channel);
    append_u48(payload, r.pulse_index);
    append_u64(payload, static_cast<std::uint64_t>(r.timestamp_ps));
  }
  write_file_atomic(path, payload, std::ios::binary);
}

void write_csv(const TimeTagStream& stream, const std::filesystem::path& path) {
  std::ostringstream os;
  os << kCsvBanner << '\n';
  std::istringstream header(header_text(stream));
  for (std::string line; std::getline(header, line);) os << "# " << line << '\n';
  os << kCsvColumns << '\n';
  for (const auto& r : stream.records)
    os << r.channel << ',' << r.pulse_index << ',' << r.timestamp_ps << '\n';
  write_file_atomic(path, os.str(), std::ios::out);
}

TimeTagStream read_binary(const std::string& data) {
  if (data.size() < 10) throw FormatError(data.size(), "file too short for binary header");
  std::uint16_t version =
      static_cast<std::uint16_t>(load_le(reinterpret_cast<const unsigned char*>(data.data() + 4), 2));
  if (version != kVersion)
    throw FormatError(4, "unsupported format version " + std::to_string(version));
  const std::uint64_t header_len =
      load_le(reinterpret_cast<const unsigned char*>(data.data() + 6), 4);
  if (10 + header_len > data.size())
    throw FormatError(data.size(), "truncated header: expected " + std::to_string(header_len) +
                                       " header bytes");

  TimeTagStream stream;
  stream.header = parse_header_text(data.substr(10, header_len), 10);

  const std::uint64_t body_offset = 10 + header_len;
  const std::uint64_t body_bytes = data.size() - body_offset;
  const std::uint64_t expected = stream.header.record_count * kRecordBytes;
  if (body_bytes != expected)
    throw FormatError(body_offset + std::min(body_bytes, expected),
                      "body holds " + std::to_string(body_bytes / kRecordBytes) +
                          " records, header declares " +
                          std::to_string(stream.header.record_count));

  stream.records.resize(stream.header.record_count);
  const auto* p = reinterpret_cast<const unsigned char*>(data.data() + body_offset);
  std::int64_t prev = 0;
  for (std::uint64_t i = 0; i < stream.header.record_count; ++i, p += kRecordBytes) {
    DetectionRecord& r = stream.records[i];
    r.channel = static_cast<std::uint16_t>(load_le(p, 2));
    r.pulse_index = load_le(p + 2, 6);
    r.timestamp_ps = static_cast<std::int64_t>(load_le(p + 8, 8));
    if (r.timestamp_ps < prev)
      throw FormatError(body_offset + i * kRecordBytes, "records are not time-sorted");
    prev = r.timestamp_ps;
  }
  return stream;
}

TimeTagStream read_csv(const std::string& data) {
  std::string header_lines;
  TimeTagStream stream;
  std::int64_t prev = 0;
  bool saw_columns = false;
  bool header_parsed = false;

  std::size_t pos = 0;
  std::uint64_t line_offset = 0;
  while (pos < data.size()) {
    const std::size_t eol = std::min(data.find('\n', pos), data.size());
    std::string line = data.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    line_offset = pos;
    pos = eol + 1;

    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line == kCsvBanner) continue;
      std::string body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      header_lines += body;
      header_lines += '\n';
      continue;
    }
    if (!saw_columns) {
      if (line != kCsvColumns)
        throw FormatError(line_offset, "expected column header \"" + std::string(kCsvColumns) +
                                           "\", got \"" + line + "\"");
      saw_columns = true;
      stream.header = parse_header_text(header_lines, 0);
      header_parsed = true;
      stream.records.reserve(stream.header.record_count);
      continue;
    }

    DetectionRecord r;
    const char* begin = line.data();
    const char* end = line.data() + line.size();
    auto res = std::from_chars(begin, end, r.channel);
    if (res.ec != std::errc{} || res.ptr == end || *res.ptr != ',')
      throw FormatError(line_offset, "malformed record line \"" + line + "\"");
    res = std::from_chars(res.ptr + 1, end, r.pulse_index);
    if (res.ec != std::errc{} || res.ptr == end || *res.ptr != ',')
      throw FormatError(line_offset, "malformed record line \"" + line + "\"");
    res = std::from_chars(res.ptr + 1, end, r.timestamp_ps);
    if (res.ec != std::errc{} || res.ptr != end)
      throw FormatError(line_offset, "malformed record line \"" + line + "\"");
    if (r.timestamp_ps < prev) throw FormatError(line_offset, "records are not time-sorted");
    prev = r.timestamp_ps;
    stream.records.push_back(r);
  }

  if (!header_parsed) throw FormatError(line_offset, "missing column header line");
  if (stream.records.size() != stream.header.record_count)
    throw FormatError(line_offset, "body holds " + std::to_string(stream.records.size()) +
                                       " records, header declares " +
                                       std::to_string(stream.header.record_count));
  return stream;
}

}  // namespace

void write_tagfile(const TimeTagStream& stream, const std::filesystem::path& path,
                   TagFormat format) {
  check_writable(stream);
  if (format == TagFormat::binary)
    write_binary(stream, path);
  else
    write_csv(stream, path);
}

TimeTagStream read_tagfile(const std::filesystem::path& path) {
  const std::string data = read_file(path);

  if (data.size() >= 4 && std::memcmp(data.data(), kMagic, 4) == 0) return read_binary(data);
  if (!data.empty() && (data[0] == '#' || data[0] == 'c')) return read_csv(data);
  throw FormatError(0, "unrecognized tag file (bad magic)");
}

}  // namespace qdc
