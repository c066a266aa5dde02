// function_words.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "corpsim/corpus.hpp"

namespace corpsim {

// Determiners, pronouns, prepositions, conjunctions, auxiliaries and common
// adverbial function words. Lowercase, matching the default tokenizer.
const std::vector<std::string_view>& english_function_words() {
  static const std::vector<std::string_view> kWords = {
    "a", "about", "above", "across", "after", "afterwards", "against", "all",
    "almost", "alone", "along", "already", "also", "although", "always", "am",
    "among", "amongst", "an", "and", "another", "any", "anybody", "anyhow",
    "anyone", "anything", "anyway", "anywhere", "are", "around", "as", "at", "be",
    "because", "been", "before", "beforehand", "behind", "being",
    "below", "beside", "besides", "between", "beyond", "both", "but", "by", "can",
    "cannot", "could", "did", "do", "does", "doing", "done", "down", "during",
    "each", "either", "else", "elsewhere", "enough", "etc", "even", "ever",
    "every", "everybody", "everyone", "everything", "everywhere", "except", "few",
    "for", "from", "further", "had", "has", "have", "having", "he", "hence",
    "her", "here", "hereafter", "hereby", "herein", "hers", "herself", "him",
    "himself", "his", "how", "however", "i", "if", "in", "indeed", "inside",
    "into", "is", "it", "its", "itself", "just", "least", "less", "may", "me",
    "might", "mine", "more", "moreover", "most", "mostly", "much", "must", "my",
    "myself", "neither", "never", "nevertheless", "next", "no", "nobody", "none",
    "noone", "nor", "not", "nothing", "now", "nowhere", "of", "off", "often",
    "on", "once", "one", "only", "onto", "or", "other", "others", "otherwise",
    "our", "ours", "ourselves", "out", "over", "own", "per", "perhaps", "quite",
    "rather", "same", "several", "shall", "she", "should", "since", "so", "some",
    "somebody", "somehow", "someone", "something", "sometime", "sometimes",
    "somewhere", "such", "than", "that", "the", "their", "theirs", "them",
    "themselves", "then", "thence", "there", "thereafter", "thereby", "therefore",
    "therein", "these", "they", "this", "those", "though", "through",
    "throughout", "thru", "thus", "to", "together", "too", "toward", "towards",
    "under", "unless", "until", "up", "upon", "us", "very", "via", "was", "we",
    "well", "were", "what", "whatever", "when", "whence", "whenever", "where",
    "whereafter", "whereas", "whereby", "wherein", "whereupon", "wherever",
    "whether", "which", "while", "whither", "who", "whoever", "whole", "whom",
    "whose", "why", "will", "with", "within", "without", "would", "yet", "you",
    "your", "yours", "yourself", "yourselves",
  };
  return kWords;
}

}  // namespace corpsim
