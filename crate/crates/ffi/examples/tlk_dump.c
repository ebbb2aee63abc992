/* Prints every entry of a binary talk table with its detected label.
 *
 *   cargo build -p persuasion-corpus-ffi --release
 *   cc -Icrates/ffi/include crates/ffi/examples/tlk_dump.c \
 *      target/release/libpersuasion_corpus_ffi.a -lpthread -ldl -lm -o tlk_dump
 *   ./tlk_dump crates/core/tests/fixtures/tlk/mixed.tlk
 */
#include <stdio.h>
#include <stdlib.h>

#include "persuasion_corpus.h"

static unsigned char *read_file(const char *path, size_t *len) {
    FILE *f = fopen(path, "rb");
    if (!f) return NULL;
    fseek(f, 0, SEEK_END);
    long size = ftell(f);
    fseek(f, 0, SEEK_SET);
    unsigned char *buf = malloc(size > 0 ? (size_t)size : 1);
    *len = fread(buf, 1, (size_t)size, f);
    fclose(f);
    return buf;
}

int main(int argc, char **argv) {
    if (argc != 2) {
        fprintf(stderr, "usage: %s FILE.tlk\n", argv[0]);
        return 2;
    }
    size_t len = 0;
    unsigned char *data = read_file(argv[1], &len);
    if (!data) {
        perror(argv[1]);
        return 1;
    }
    PcTalkTable *table = NULL;
    PcStatus status = pc_tlk_parse(data, len, NULL, &table);
    free(data);
    if (status != PC_STATUS_OK) {
        fprintf(stderr, "error %d: %s\n", (int)status, pc_last_error_message());
        return 1;
    }
    for (uint32_t i = 0; i < pc_tlk_len(table); i++) {
        char *text = NULL;
        int persuade = 0;
        if (pc_tlk_text(table, i, &text) != PC_STATUS_OK) break;
        pc_detect_label(text, &persuade);
        printf("%u\t%s\t%s\n", i, persuade ? "persuade" : "non_persuade", text);
        pc_string_free(text);
    }
    pc_tlk_free(table);
    return 0;
}
