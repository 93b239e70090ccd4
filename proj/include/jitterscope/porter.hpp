#pragma once

#include <string>
#include <string_view>

namespace jitterscope::ingest {

/// Classic Porter (1980) suffix stripper for lowercase ASCII words. Words of
/// length <= 2 and words containing non [a-z] characters are returned as is.
std::string porter_stem(std::string_view word);

/// Applies porter_stem until the word stops changing (at most a handful of
/// rounds), so that stemming a stem is a no-op.
std::string stem_fixed_point(std::string_view word);

}  // namespace jitterscope::ingest
