#pragma once

// Master/worker wire format, protocol version 1.
//
// frame   = length payload
// length  = 4-byte big-endian byte count of payload, at most 1 MiB
// payload = key=value pairs separated by single spaces
//
// Keys always appear in this order, each only when the kind uses it:
//   kind run_id protocol_version iteration particle_id word b p fitness topology_id detail
//
//   HELLO   kind run_id protocol_version
//   ASSIGN  ... iteration particle_id word
//   RESULT  ... iteration particle_id word b p fitness topology_id
//   BEST    ... iteration word fitness
//   STOP    kind run_id protocol_version
//   ERROR   ... detail
//
// Every byte of a value outside [A-Za-z0-9._-] is written as %XX (uppercase hex).

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "phyloswarm/bitspace.hpp"

namespace phyloswarm {

inline constexpr std::uint32_t kProtocolVersion = 1;
inline constexpr std::size_t kMaxPayloadBytes = 1u << 20;

enum class MessageKind { Hello, Assign, Result, Best, Stop, Error };

std::string_view to_string(MessageKind kind) noexcept;

struct WireMessage {
  MessageKind kind = MessageKind::Hello;
  std::string run_id;
  std::uint32_t protocol_version = kProtocolVersion;
  std::uint64_t iteration = 0;
  std::uint64_t particle_id = 0;
  std::string word;         // '0'/'1' text
  std::string b;            // decimal text
  std::string p;
  std::string fitness;
  std::string topology_id;  // lowercase hex or empty
  std::string detail;       // ERROR only

  bool operator==(const WireMessage&) const = default;
};

enum class FrameErrorCode {
  TooLarge,        // declared payload length over the limit
  LengthMismatch,  // frame shorter or longer than its header says
  UnknownKind,
  MissingKey,
  UnknownKey,      // unknown name, repeated, out of order, or not used by the kind
  BadEscape,
  BadNumber,
  Malformed,
};

std::string_view to_string(FrameErrorCode code) noexcept;

class FrameError : public std::runtime_error {
 public:
  FrameError(FrameErrorCode code, const std::string& detail);
  FrameErrorCode code() const noexcept { return code_; }

 private:
  FrameErrorCode code_;
};

std::string percent_escape(std::string_view raw);
std::string percent_unescape(std::string_view escaped);

std::string encode_payload(const WireMessage& message);
WireMessage decode_payload(std::string_view payload);

std::string encode_frame(const WireMessage& message);
WireMessage decode_frame(std::string_view frame);

/// Reads the 4-byte length prefix; throws TooLarge past the limit.
std::size_t frame_payload_length(std::string_view header);

WireMessage make_hello(std::string run_id);
WireMessage make_assign(std::string run_id, std::uint64_t iteration, std::uint64_t particle,
                        const BinaryPosition& word);
WireMessage make_result(std::string run_id, std::uint64_t iteration, std::uint64_t particle,
                        const BinaryPosition& word, const FitnessReport& report);
WireMessage make_best(std::string run_id, std::uint64_t iteration, const BinaryPosition& word, double fitness);
WireMessage make_stop(std::string run_id);
WireMessage make_error(std::string run_id, std::string detail);

/// The report carried by a RESULT message.
FitnessReport report_of(const WireMessage& message);

}  // namespace phyloswarm
