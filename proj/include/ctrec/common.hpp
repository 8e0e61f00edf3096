#pragma once

#include <stdexcept>
#include <string>

namespace ctrec {

enum class Err {
  Io,
  Format,
  DegenerateImage,
  PatchTooSmall,
  DimensionMismatch,
  DegenerateClass,
  NonFinite,
  RankDeficient,
  EmptySequence,
  EmptyLexicon,
  UnknownCharacter,
  InsufficientData,
  UnknownGlyph,
  LevelOutOfRange,
  LengthMismatch,
  BadConfig,
};

class Error : public std::runtime_error {
public:
  Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const { return code_; }

private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

// Axis-aligned pixel rectangle, [x, x+w) x [y, y+h).
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
};

}  // namespace ctrec
