package demo;

import org.junit.Test;
import static org.junit.Assert.assertTrue;

public class MoneyTest {
    @Test
    public void tenAndTwentyCents() {
        assertTrue(new Money().showBug());
    }
}
