/* copy.h - public interface of the copy engine. */

#ifndef COPY_H
#define COPY_H

int copy_file (const char *src, const char *dst, int want_backup);
int copy_internal (const char *src, const char *dst);
int do_link (const char *from, const char *to);

#endif /* COPY_H */
