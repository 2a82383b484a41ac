/** Non-blocking toast notifications appended to a fixed region. */

export interface ToastOptions {
  retryLabel?: string;
  onRetry?: () => void;
  timeoutMs?: number;
}

export function showToast(region: HTMLElement, text: string, options: ToastOptions = {}): HTMLElement {
  const doc = region.ownerDocument;
  const toast = doc.createElement("div");
  toast.className = "toast";

  const body = doc.createElement("span");
  body.className = "toast-text";
  body.textContent = text;
  toast.append(body);

  if (options.onRetry) {
    const retry = doc.createElement("button");
    retry.className = "toast-retry";
    retry.textContent = options.retryLabel ?? "retry";
    retry.addEventListener("click", () => {
      toast.remove();
      options.onRetry?.();
    });
    toast.append(retry);
  }

  const close = doc.createElement("button");
  close.className = "toast-close";
  close.textContent = "×";
  close.addEventListener("click", () => toast.remove());
  toast.append(close);

  region.append(toast);
  const timeout = options.timeoutMs ?? 8000;
  if (timeout > 0) {
    setTimeout(() => toast.remove(), timeout);
  }
  return toast;
}
