#include "phyloswarm/wire.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <vector>

namespace phyloswarm {

namespace {

enum Field : std::size_t {
  kKind,
  kRunId,
  kVersion,
  kIteration,
  kParticle,
  kWord,
  kB,
  kP,
  kFitness,
  kTopology,
  kDetail,
  kFieldCount
};

constexpr std::array<std::string_view, kFieldCount> kFieldNames{
    "kind", "run_id", "protocol_version", "iteration", "particle_id", "word",
    "b",    "p",      "fitness",          "topology_id", "detail"};

constexpr std::array<std::string_view, 6> kKindNames{"HELLO", "ASSIGN", "RESULT", "BEST", "STOP", "ERROR"};

std::vector<Field> fields_of(MessageKind kind) {
  switch (kind) {
    case MessageKind::Hello:
    case MessageKind::Stop:
      return {kKind, kRunId, kVersion};
    case MessageKind::Assign:
      return {kKind, kRunId, kVersion, kIteration, kParticle, kWord};
    case MessageKind::Result:
      return {kKind, kRunId, kVersion, kIteration, kParticle, kWord, kB, kP, kFitness, kTopology};
    case MessageKind::Best:
      return {kKind, kRunId, kVersion, kIteration, kWord, kFitness};
    case MessageKind::Error:
      return {kKind, kRunId, kVersion, kDetail};
  }
  return {};
}

bool is_safe(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' || c == '_' ||
         c == '-';
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  std::uint64_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    throw FrameError(FrameErrorCode::BadNumber, std::string(key) + "=" + std::string(text));
  }
  return value;
}

void check_real(std::string_view key, const std::string& text) {
  try {
    if (!std::isfinite(parse_real(text))) throw std::invalid_argument("not finite");
  } catch (const std::exception&) {
    throw FrameError(FrameErrorCode::BadNumber, std::string(key) + "=" + text);
  }
}

std::string field_value(const WireMessage& m, Field field) {
  switch (field) {
    case kKind: return std::string(to_string(m.kind));
    case kRunId: return m.run_id;
    case kVersion: return std::to_string(m.protocol_version);
    case kIteration: return std::to_string(m.iteration);
    case kParticle: return std::to_string(m.particle_id);
    case kWord: return m.word;
    case kB: return m.b;
    case kP: return m.p;
    case kFitness: return m.fitness;
    case kTopology: return m.topology_id;
    case kDetail: return m.detail;
    case kFieldCount: break;
  }
  return {};
}

void put_be32(std::string& out, std::uint32_t value) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((value >> shift) & 0xff));
}

}  // namespace

std::string_view to_string(MessageKind kind) noexcept { return kKindNames[static_cast<std::size_t>(kind)]; }

std::string_view to_string(FrameErrorCode code) noexcept {
  switch (code) {
    case FrameErrorCode::TooLarge: return "frame-too-large";
    case FrameErrorCode::LengthMismatch: return "length-mismatch";
    case FrameErrorCode::UnknownKind: return "unknown-kind";
    case FrameErrorCode::MissingKey: return "missing-key";
    case FrameErrorCode::UnknownKey: return "unknown-key";
    case FrameErrorCode::BadEscape: return "bad-escape";
    case FrameErrorCode::BadNumber: return "bad-number";
    case FrameErrorCode::Malformed: return "malformed";
  }
  return "unknown";
}

FrameError::FrameError(FrameErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

std::string percent_escape(std::string_view raw) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(raw.size());
  for (char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_safe(c)) {
      out.push_back(ch);
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xf]);
    }
  }
  return out;
}

std::string percent_unescape(std::string_view escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    const char ch = escaped[i];
    if (ch == '%') {
      if (i + 2 >= escaped.size()) {
        throw FrameError(FrameErrorCode::BadEscape, "truncated escape in '" + std::string(escaped) + "'");
      }
      const int hi = hex_value(escaped[i + 1]);
      const int lo = hex_value(escaped[i + 2]);
      if (hi < 0 || lo < 0) {
        throw FrameError(FrameErrorCode::BadEscape, "invalid escape in '" + std::string(escaped) + "'");
      }
      out.push_back(static_cast<char>(hi * 16 + lo));
      i += 2;
    } else if (is_safe(static_cast<unsigned char>(ch))) {
      out.push_back(ch);
    } else {
      throw FrameError(FrameErrorCode::BadEscape, "unescaped byte in '" + std::string(escaped) + "'");
    }
  }
  return out;
}

std::string encode_payload(const WireMessage& message) {
  std::string out;
  for (Field field : fields_of(message.kind)) {
    if (!out.empty()) out.push_back(' ');
    out += kFieldNames[field];
    out.push_back('=');
    out += percent_escape(field_value(message, field));
  }
  return out;
}

WireMessage decode_payload(std::string_view payload) {
  std::array<std::optional<std::string>, kFieldCount> values;
  std::size_t last = 0;
  bool first = true;
  std::size_t pos = 0;
  while (pos <= payload.size()) {
    std::size_t end = payload.find(' ', pos);
    if (end == std::string_view::npos) end = payload.size();
    const std::string_view token = payload.substr(pos, end - pos);
    const std::size_t eq = token.find('=');
    if (token.empty() || eq == std::string_view::npos) {
      throw FrameError(FrameErrorCode::Malformed, "expected key=value, got '" + std::string(token) + "'");
    }
    const std::string_view key = token.substr(0, eq);
    std::size_t index = kFieldCount;
    for (std::size_t f = 0; f < kFieldCount; ++f) {
      if (kFieldNames[f] == key) index = f;
    }
    if (index == kFieldCount) throw FrameError(FrameErrorCode::UnknownKey, std::string(key));
    if (!first && index <= last) {
      throw FrameError(FrameErrorCode::UnknownKey, std::string(key) + " repeated or out of order");
    }
    values[index] = percent_unescape(token.substr(eq + 1));
    last = index;
    first = false;
    pos = end + 1;
  }

  if (!values[kKind]) throw FrameError(FrameErrorCode::MissingKey, "kind");
  WireMessage m;
  std::size_t kind_index = kKindNames.size();
  for (std::size_t k = 0; k < kKindNames.size(); ++k) {
    if (kKindNames[k] == *values[kKind]) kind_index = k;
  }
  if (kind_index == kKindNames.size()) throw FrameError(FrameErrorCode::UnknownKind, *values[kKind]);
  m.kind = static_cast<MessageKind>(kind_index);

  const std::vector<Field> expected = fields_of(m.kind);
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    const bool wanted = std::find(expected.begin(), expected.end(), static_cast<Field>(f)) != expected.end();
    if (wanted && !values[f]) {
      throw FrameError(FrameErrorCode::MissingKey, std::string(kFieldNames[f]) + " in " + *values[kKind]);
    }
    if (!wanted && values[f]) {
      throw FrameError(FrameErrorCode::UnknownKey, std::string(kFieldNames[f]) + " in " + *values[kKind]);
    }
  }

  auto take = [&](Field f) { return values[f] ? std::move(*values[f]) : std::string(); };
  m.run_id = take(kRunId);
  const std::uint64_t version = parse_unsigned("protocol_version", take(kVersion));
  if (version > UINT32_MAX) throw FrameError(FrameErrorCode::BadNumber, "protocol_version out of range");
  m.protocol_version = static_cast<std::uint32_t>(version);
  if (values[kIteration]) m.iteration = parse_unsigned("iteration", take(kIteration));
  if (values[kParticle]) m.particle_id = parse_unsigned("particle_id", take(kParticle));
  m.word = take(kWord);
  if (m.word.find_first_not_of("01") != std::string::npos) {
    throw FrameError(FrameErrorCode::Malformed, "word must be 0/1 text");
  }
  m.b = take(kB);
  m.p = take(kP);
  m.fitness = take(kFitness);
  if (m.kind == MessageKind::Result) {
    check_real("b", m.b);
    check_real("p", m.p);
  }
  if (m.kind == MessageKind::Result || m.kind == MessageKind::Best) check_real("fitness", m.fitness);
  m.topology_id = take(kTopology);
  if (m.topology_id.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw FrameError(FrameErrorCode::Malformed, "topology_id must be lowercase hex");
  }
  m.detail = take(kDetail);
  return m;
}

std::string encode_frame(const WireMessage& message) {
  const std::string payload = encode_payload(message);
  if (payload.size() > kMaxPayloadBytes) {
    throw FrameError(FrameErrorCode::TooLarge, std::to_string(payload.size()) + " bytes");
  }
  std::string frame;
  frame.reserve(payload.size() + 4);
  put_be32(frame, static_cast<std::uint32_t>(payload.size()));
  frame += payload;
  return frame;
}

std::size_t frame_payload_length(std::string_view header) {
  if (header.size() < 4) throw FrameError(FrameErrorCode::LengthMismatch, "incomplete length prefix");
  std::uint32_t length = 0;
  for (std::size_t i = 0; i < 4; ++i) length = (length << 8) | static_cast<unsigned char>(header[i]);
  if (length > kMaxPayloadBytes) {
    throw FrameError(FrameErrorCode::TooLarge, "declared " + std::to_string(length) + " bytes");
  }
  return length;
}

WireMessage decode_frame(std::string_view frame) {
  const std::size_t length = frame_payload_length(frame);
  if (frame.size() - 4 != length) {
    throw FrameError(FrameErrorCode::LengthMismatch, "header says " + std::to_string(length) + ", frame carries " +
                                                         std::to_string(frame.size() - 4));
  }
  return decode_payload(frame.substr(4));
}

WireMessage make_hello(std::string run_id) {
  WireMessage m;
  m.kind = MessageKind::Hello;
  m.run_id = std::move(run_id);
  return m;
}

WireMessage make_assign(std::string run_id, std::uint64_t iteration, std::uint64_t particle,
                        const BinaryPosition& word) {
  WireMessage m;
  m.kind = MessageKind::Assign;
  m.run_id = std::move(run_id);
  m.iteration = iteration;
  m.particle_id = particle;
  m.word = word.to_string();
  return m;
}

WireMessage make_result(std::string run_id, std::uint64_t iteration, std::uint64_t particle,
                        const BinaryPosition& word, const FitnessReport& report) {
  WireMessage m;
  m.kind = MessageKind::Result;
  m.run_id = std::move(run_id);
  m.iteration = iteration;
  m.particle_id = particle;
  m.word = word.to_string();
  m.b = format_real(report.b);
  m.p = format_real(report.p);
  m.fitness = format_real(report.fitness);
  m.topology_id = report.topology_id;
  return m;
}

WireMessage make_best(std::string run_id, std::uint64_t iteration, const BinaryPosition& word, double fitness) {
  WireMessage m;
  m.kind = MessageKind::Best;
  m.run_id = std::move(run_id);
  m.iteration = iteration;
  m.word = word.to_string();
  m.fitness = format_real(fitness);
  return m;
}

WireMessage make_stop(std::string run_id) {
  WireMessage m;
  m.kind = MessageKind::Stop;
  m.run_id = std::move(run_id);
  return m;
}

WireMessage make_error(std::string run_id, std::string detail) {
  WireMessage m;
  m.kind = MessageKind::Error;
  m.run_id = std::move(run_id);
  m.detail = std::move(detail);
  return m;
}

FitnessReport report_of(const WireMessage& message) {
  if (message.kind != MessageKind::Result) throw std::invalid_argument("report_of: not a RESULT message");
  return FitnessReport{parse_real(message.b), parse_real(message.p), parse_real(message.fitness),
                       message.topology_id};
}

}  // namespace phyloswarm
