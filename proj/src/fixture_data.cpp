// fixture_data.cpp
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

#include "corpsim/analysis.hpp"

namespace corpsim {

// Similarity values and F1 improvements for 6 NER targets x 5 pretraining
// sources. TVC and TVcC are percentages. Kept byte-identical to
// data/ner_fixture.csv.
std::string_view bundled_fixture_csv() {
  static constexpr std::string_view kCsv =
      "target,source,ppl,wvv,tvc,tvcc,delta_wv,delta_lm\n"
      "CADEC,1BWB,307.4,1.137,81.73,82.94,3.30,3.94\n"
      "CADEC,MIMIC,1007.0,1.134,78.19,81.69,3.51,3.97\n"
      "CADEC,PubMed,927.4,1.195,78.81,79.79,3.70,4.01\n"
      "CADEC,Wiki,519.8,1.196,79.74,76.71,3.48,3.18\n"
      "CADEC,Yelp,291.1,1.104,80.76,82.28,4.13,4.32\n"
      "CoNLL2003,1BWB,480.6,1.020,75.64,87.35,4.28,7.70\n"
      "CoNLL2003,MIMIC,2945.0,1.542,34.47,39.55,2.86,1.60\n"
      "CoNLL2003,PubMed,3143.1,1.356,53.29,68.41,3.48,2.07\n"
      "CoNLL2003,Wiki,650.4,1.159,66.21,80.87,4.24,7.03\n"
      "CoNLL2003,Yelp,2025.5,1.399,53.92,68.95,3.50,3.11\n"
      "CRAFT,1BWB,1328.1,2.073,59.07,62.98,4.80,2.06\n"
      "CRAFT,MIMIC,2427.5,2.390,48.73,50.03,3.84,2.73\n"
      "CRAFT,PubMed,360.3,1.838,76.29,80.69,6.28,6.28\n"
      "CRAFT,Wiki,974.7,2.075,63.66,63.12,4.90,0.58\n"
      "CRAFT,Yelp,2085.7,2.187,48.01,50.85,3.31,3.58\n"
      "JNLPBA,1BWB,1190.8,2.000,39.90,53.54,1.94,2.09\n"
      "JNLPBA,MIMIC,2533.4,2.172,36.95,50.04,2.79,1.31\n"
      "JNLPBA,PubMed,205.9,1.597,58.87,80.17,2.32,3.84\n"
      "JNLPBA,Wiki,717.9,2.036,42.34,53.05,2.32,1.97\n"
      "JNLPBA,Yelp,2134.4,2.155,30.78,41.41,2.08,2.06\n"
      "ScienceIE,1BWB,884.6,1.197,71.50,76.78,7.55,11.25\n"
      "ScienceIE,MIMIC,2706.7,1.461,54.29,59.34,4.38,8.42\n"
      "ScienceIE,PubMed,345.6,1.037,83.25,87.01,11.06,15.22\n"
      "ScienceIE,Wiki,684.2,1.127,76.99,78.01,9.30,13.54\n"
      "ScienceIE,Yelp,1562.2,1.347,62.32,66.42,7.07,9.20\n"
      "WetLab,1BWB,1526.0,2.167,59.67,61.47,1.75,2.26\n"
      "WetLab,MIMIC,3046.1,2.393,53.83,55.31,1.13,1.74\n"
      "WetLab,PubMed,1104.7,2.078,71.39,74.46,2.02,2.71\n"
      "WetLab,Wiki,1617.8,2.158,61.02,60.31,1.54,2.14\n"
      "WetLab,Yelp,1784.5,2.240,54.16,54.96,1.57,2.13\n";
  return kCsv;
}

}  // namespace corpsim
