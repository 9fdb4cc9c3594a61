package demo;

public class Durations {
    static final int MILLIS_PER_DAY = 86400000;

    public long showBug(int days) {
        long millis = days * MILLIS_PER_DAY;
        long seconds;
        seconds = millis / 1000L;
        return seconds;
    }
}
