#pragma once

// Convenience header pulling in the whole library.

#include "vardf/corpus.hpp"
#include "vardf/crawler.hpp"
#include "vardf/errors.hpp"
#include "vardf/evaluation.hpp"
#include "vardf/format.hpp"
#include "vardf/greedy.hpp"
#include "vardf/hidden_db.hpp"
#include "vardf/html.hpp"
#include "vardf/term_index.hpp"
#include "vardf/text.hpp"
#include "vardf/url.hpp"
#include "vardf/weighting.hpp"
