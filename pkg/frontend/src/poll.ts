// Interval polling with an in-flight guard, matching the pipeline cadence.
// The interval can be retuned live when the server's scheduler settings
// change; ticks are skipped while the tab is hidden.

export interface PollerOptions {
  task: () => Promise<void>;
  intervalMs: number;
  isHidden?: () => boolean;
  onError?: (err: unknown) => void;
}

export interface Poller {
  start(): void;
  stop(): void;
  tickNow(): Promise<void>;
  setIntervalMs(ms: number): void;
  readonly intervalMs: number;
}

export function createPoller(opts: PollerOptions): Poller {
  let interval = opts.intervalMs;
  let timer: ReturnType<typeof setInterval> | null = null;
  let inFlight = false;
  const hidden = opts.isHidden ?? (() => false);

  const tick = async () => {
    if (inFlight || hidden()) return;
    inFlight = true;
    try {
      await opts.task();
    } catch (err) {
      opts.onError?.(err);
    } finally {
      inFlight = false;
    }
  };

  const arm = () => {
    if (timer !== null) clearInterval(timer);
    timer = setInterval(() => void tick(), interval);
  };

  return {
    get intervalMs() {
      return interval;
    },
    start() {
      if (timer === null) {
        void tick();
        arm();
      }
    },
    stop() {
      if (timer !== null) {
        clearInterval(timer);
        timer = null;
      }
    },
    tickNow: tick,
    setIntervalMs(ms: number) {
      if (ms > 0 && ms !== interval) {
        interval = ms;
        if (timer !== null) arm();
      }
    },
  };
}
