/* paraeval C API.
 *
 * Every call returns a pe_status; on failure pe_last_error() describes it.
 * Strings returned through char** are heap-allocated and released with
 * pe_free_string(). Handles are opaque and released with their *_free call.
 * Handles are not thread-safe; distinct handles may be used concurrently.
 */
#ifndef PARAEVAL_H
#define PARAEVAL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(PARAEVAL_BUILDING_LIBRARY)
#define PE_API __attribute__((visibility("default")))
#else
#define PE_API
#endif

typedef enum pe_status {
  PE_OK = 0,
  PE_ERR_USAGE = 1,    /* bad argument or option */
  PE_ERR_DATA = 2,     /* malformed input data */
  PE_ERR_EXTERNAL = 3, /* embedding or judge service failure */
  PE_ERR_IO = 4,       /* file could not be read or written */
  PE_ERR_INTERNAL = 5
} pe_status;

PE_API const char* pe_version(void);
/* Message for the last failed call on this thread, "" if none. */
PE_API const char* pe_last_error(void);
PE_API void pe_free_string(char* s);

/* ---- text ------------------------------------------------------------- */

PE_API pe_status pe_normalize(const char* text, char** out);

typedef struct pe_lexical_scores {
  double bow_overlap;
  double token_jaccard;
  double corpus_bleu;
  double corpus_bleu2;
  double sentence_bleu;
  double google_bleu;
  double meteor;
  double rouge1;
  double rouge2;
  double rougeL;
  double ter;
  double wer;
  double character;
} pe_lexical_scores;

/* tokenizer: "unicode_words" (default when NULL) or "whitespace". */
PE_API pe_status pe_lexical_pair(const char* source, const char* paraphrase, const char* tokenizer,
                                 pe_lexical_scores* out);

/* ---- syntax ----------------------------------------------------------- */

typedef struct pe_syntax_options {
  int strip_leaves;
  int normalize_by_nodes;
  int parent_child_pairs; /* 0: dominance node pairs */
  size_t kermit_dim;
  double kermit_lambda;
} pe_syntax_options;

PE_API void pe_syntax_options_init(pe_syntax_options* options);

typedef struct pe_syntactic_scores {
  double ted_f;
  double ted_3;
  double kermit;
  double subtree_k;
  double node_pair_k;
} pe_syntactic_scores;

/* Trees in bracket notation, e.g. "(S (NP it) (VP rains))". */
PE_API pe_status pe_syntactic_pair(const char* source_tree, const char* paraphrase_tree,
                                   const pe_syntax_options* options, pe_syntactic_scores* out);
/* max_depth 0 compares whole trees. */
PE_API pe_status pe_tree_edit_distance(const char* a, const char* b, size_t max_depth,
                                       unsigned long long* out);

/* ---- corpus ----------------------------------------------------------- */

typedef struct pe_corpus pe_corpus;

typedef struct pe_load_options {
  const char* format; /* "jsonl" (default) or "tsv" */
  int tsv_header;
  const char* name; /* NULL: file stem */
} pe_load_options;

PE_API void pe_load_options_init(pe_load_options* options);
PE_API pe_status pe_corpus_load(const char* path, const pe_load_options* options, pe_corpus** out);
PE_API pe_status pe_corpus_save(const pe_corpus* corpus, const char* path, const char* format);
PE_API size_t pe_corpus_size(const pe_corpus* corpus);
/* Duplicates dropped while loading. */
PE_API size_t pe_corpus_rejected(const pe_corpus* corpus);
PE_API pe_status pe_corpus_save_rejects(const pe_corpus* corpus, const char* path);

typedef struct pe_pair_view {
  const char* id;
  const char* source;
  const char* paraphrase;
  const char* corpus_tag;
  const char* origin; /* "dataset" or "generated" */
} pe_pair_view;

/* Views stay valid until the corpus is freed. */
PE_API pe_status pe_corpus_pair(const pe_corpus* corpus, size_t index, pe_pair_view* out);
PE_API void pe_corpus_free(pe_corpus* corpus);

/* ---- data preparation ------------------------------------------------- */

/* {"items": [...]} or {"rejected": "non_english" | "unparseable"}. */
PE_API pe_status pe_parse_llm_list(const char* response, char** json_out);

typedef struct pe_pairs_summary {
  size_t responses;
  size_t pairs;
  size_t rejected;
} pe_pairs_summary;

/* mode: "source_to_each" (default when NULL) or "all_unique". Rejects go to
 * the sidecar next to out_path. */
PE_API pe_status pe_pairs_from_responses(const char* in_path, const char* out_path, const char* mode,
                                         pe_pairs_summary* summary);

/* lexicon_path may be NULL. */
PE_API pe_status pe_restore_case(const char* source, const char* paraphrase, const char* lexicon_path,
                                 char** out);

typedef struct pe_postprocess_summary {
  size_t records;
  size_t outputs;
  size_t duplicates_removed;
} pe_postprocess_summary;

PE_API pe_status pe_postprocess_file(const char* in_path, const char* out_path, const char* lexicon_path,
                                     int as_pairs, pe_postprocess_summary* summary);

/* ---- scoring ---------------------------------------------------------- */

typedef struct pe_scorer pe_scorer;

typedef struct pe_score_options {
  const char* metrics;   /* comma list of lexical, syntax, semantic */
  const char* tokenizer; /* NULL: unicode_words */
  const char* system;
  size_t threads; /* 0: hardware concurrency */
  pe_syntax_options syntax;
} pe_score_options;

PE_API void pe_score_options_init(pe_score_options* options);
PE_API pe_status pe_scorer_create(const pe_score_options* options, pe_scorer** out);
/* "name=kind:location[;key=value...]", kind one of file, http, test_hash. */
PE_API pe_status pe_scorer_add_provider(pe_scorer* scorer, const char* spec);
PE_API pe_status pe_scorer_load_trees(pe_scorer* scorer, const char* path);
/* Pair-level JSONL, one record per pair in corpus order. */
PE_API pe_status pe_scorer_run(pe_scorer* scorer, const pe_corpus* corpus, char** pairs_jsonl);
PE_API void pe_scorer_free(pe_scorer* scorer);

/* ---- judge ------------------------------------------------------------ */

typedef struct pe_judge pe_judge;

typedef struct pe_judge_options {
  const char* endpoint;
  const char* model;
  const char* api_key_env;
  const char* offline_path; /* canned responses; no network when set */
  int retries;
  size_t parallel;
  int timeout_seconds;
  const char* system;
} pe_judge_options;

typedef struct pe_judge_summary {
  double semantic;
  double lexical;
  double syntactic;
  double grammatical;
  size_t success_count;
  size_t total;
} pe_judge_summary;

PE_API void pe_judge_options_init(pe_judge_options* options);
PE_API pe_status pe_judge_create(const pe_judge_options* options, pe_judge** out);
/* Results JSONL sorted by pair id. */
PE_API pe_status pe_judge_run(pe_judge* judge, const pe_corpus* corpus, char** results_jsonl,
                              pe_judge_summary* summary);
PE_API void pe_judge_free(pe_judge* judge);

PE_API pe_status pe_build_prompt(const char* source, const char* paraphrase, char** out);
/* ratings: semantic, lexical, syntactic, grammatical. On PE_ERR_DATA,
 * *failure names the reason (malformed_json, missing_key, out_of_range). */
PE_API pe_status pe_parse_rating(const char* response, int ratings[4], const char** failure);

/* ---- report ----------------------------------------------------------- */

typedef struct pe_report_options {
  const char* table;  /* semantic, syntactic, lexical, likert or all */
  const char* format; /* md, csv or json */
  int group_by_tag;
} pe_report_options;

PE_API void pe_report_options_init(pe_report_options* options);
PE_API pe_status pe_report_render_files(const char* const* paths, size_t count,
                                        const pe_report_options* options, char** out);
PE_API pe_status pe_report_render_text(const char* content, const pe_report_options* options, char** out);

#ifdef __cplusplus
}
#endif

#endif /* PARAEVAL_H */
